#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "hofin/sort.hpp"

namespace hofin {

using TermId = std::uint32_t;
using SymbolId = std::uint32_t;

inline constexpr SymbolId kBr = 0;

struct SymbolInfo {
  std::string name;
  unsigned rank = 0;
};

enum class TermKind : std::uint8_t { Symbol, Var, App, Abs };

// One interned node. Variables are de Bruijn indices; `hint` only feeds
// printing and never takes part in equality.
struct TermNode {
  TermKind kind = TermKind::Symbol;
  SymbolId symbol = 0;         // Symbol
  std::vector<TermId> args;    // Symbol
  std::uint32_t index = 0;     // Var
  TermId fn = 0, arg = 0;      // App
  Sort binder;                 // Abs
  TermId body = 0;             // Abs
  Sort sort;
  std::string hint;            // variable or binder name
  std::string name;            // nonterminal name on knots
  bool knot = false;
  // free_sorts[i] is the sort of free de Bruijn variable i, if it occurs
  std::vector<std::optional<Sort>> free_sorts;
};

class TermError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TermStore {
 public:
  TermStore();

  SymbolId declare_symbol(const std::string& name, unsigned rank);
  std::optional<SymbolId> find_symbol(const std::string& name) const;
  const SymbolInfo& symbol(SymbolId id) const { return symbols_.at(id); }
  std::size_t symbol_count() const { return symbols_.size(); }

  // Constructors intern structurally; they throw TermError on sort clashes.
  TermId make_symbol(SymbolId symbol, std::vector<TermId> args);
  TermId make_var(std::uint32_t index, const Sort& sort, std::string hint = {});
  TermId make_app(TermId fn, TermId arg);
  TermId make_abs(const Sort& binder, TermId body, std::string hint = {});

  // Nonterminal knots: reserve an id first so bodies can refer to it, then
  // fill it with the interned body. A knot is closed and, once filled, is the
  // node of its body's root.
  TermId reserve_knot(const std::string& name, const Sort& sort);
  void fill_knot(TermId knot, TermId body);
  bool is_filled(TermId knot) const;

  const TermNode& node(TermId id) const { return nodes_.at(id); }
  const Sort& sort_of(TermId id) const { return nodes_.at(id).sort; }
  std::size_t size() const { return nodes_.size(); }

  bool is_closed(TermId id) const { return nodes_.at(id).free_sorts.empty(); }
  bool has_free(TermId id, std::uint32_t index) const;

  // Children in a fixed order: symbol arguments, operator then operand, body.
  std::vector<TermId> children(TermId id) const;

  std::string to_string(TermId id) const;

 private:
  TermId intern(TermNode node, const std::string& key);

  std::vector<SymbolInfo> symbols_;
  std::unordered_map<std::string, SymbolId> symbol_index_;
  std::vector<TermNode> nodes_;
  std::vector<bool> filled_;
  std::unordered_map<std::string, TermId> table_;
};

// Reachable nodes in breadth-first discovery order (deterministic).
std::vector<TermId> subterm_universe(const TermStore& store, TermId root);

unsigned complexity(const TermStore& store, TermId root);

// Equality of the infinite trees unfolded from two (possibly cyclic) nodes.
bool bisimilar(const TermStore& sa, TermId a, const TermStore& sb, TermId b);

}  // namespace hofin
