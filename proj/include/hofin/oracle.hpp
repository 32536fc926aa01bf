#pragma once

#include <compare>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hofin/term.hpp"

namespace hofin {

struct RankedTree {
  std::string label;
  std::vector<RankedTree> children;

  std::strong_ordering operator<=>(const RankedTree& o) const;
  bool operator==(const RankedTree& o) const { return (*this <=> o) == 0; }
};

std::size_t tree_size(const RankedTree& t);
std::string to_string(const RankedTree& t);  // a(b(e,e))

class SortMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Replaces de Bruijn variable `index` of `term` by `value` (given in the
// context outside the binder of `index`), lowering the indices above it.
// With index 0 this is the body side of a beta step.
TermId substitute(TermStore& store, TermId term, std::uint32_t index, TermId value);

struct HeadForm {
  enum class Kind { Constructor, Diverged } kind = Kind::Diverged;
  SymbolId symbol = 0;
  std::vector<TermId> args;
  unsigned steps = 0;   // beta steps spent
  bool proven = false;  // Diverged because the reduction revisited a term
};

// Leftmost-outermost reduction of a closed ground term to a symbol head.
HeadForm head_reduce(TermStore& store, TermId t, unsigned max_steps);

struct Budget {
  unsigned max_beta_steps = 1000;  // per path of the expansion
  unsigned max_tree_size = 10;
};

struct LanguageSample {
  std::set<RankedTree> trees;
  // True when nothing was cut by either budget, so `trees` is all of L.
  bool complete = true;
  bool step_cut = false;
  bool size_cut = false;
  std::size_t diverged_branches = 0;

  std::set<std::size_t> sizes() const;
};

LanguageSample enumerate_language(TermStore& store, TermId t, const Budget& budget);

}  // namespace hofin
