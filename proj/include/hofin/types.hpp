#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hofin/sort.hpp"
#include "hofin/term.hpp"

namespace hofin {

// A set of orders, as a bitmask. Orders stay far below 32 in practice.
class OrderSet {
 public:
  constexpr OrderSet() = default;
  constexpr explicit OrderSet(std::uint32_t bits) : bits_(bits) {}
  OrderSet(std::initializer_list<unsigned> xs) {
    for (unsigned x : xs) insert(x);
  }

  static OrderSet below(unsigned k) { return OrderSet(k >= 32 ? ~0u : (1u << k) - 1); }

  bool contains(unsigned n) const { return n < 32 && (bits_ >> n) & 1u; }
  void insert(unsigned n) { bits_ |= 1u << n; }
  void erase(unsigned n) { bits_ &= ~(1u << n); }
  bool empty() const { return bits_ == 0; }
  std::uint32_t bits() const { return bits_; }
  unsigned size() const { return static_cast<unsigned>(__builtin_popcount(bits_)); }

  OrderSet restrict_below(unsigned k) const { return OrderSet(bits_ & below(k).bits_); }
  OrderSet restrict_from(unsigned k) const { return OrderSet(bits_ & ~below(k).bits_); }
  bool subset_of(OrderSet o) const { return (bits_ & ~o.bits_) == 0; }
  bool disjoint(OrderSet o) const { return (bits_ & o.bits_) == 0; }

  friend OrderSet operator|(OrderSet a, OrderSet b) { return OrderSet(a.bits_ | b.bits_); }
  friend OrderSet operator&(OrderSet a, OrderSet b) { return OrderSet(a.bits_ & b.bits_); }
  friend OrderSet operator-(OrderSet a, OrderSet b) { return OrderSet(a.bits_ & ~b.bits_); }
  friend bool operator==(OrderSet a, OrderSet b) = default;
  friend auto operator<=>(OrderSet a, OrderSet b) = default;

  std::string to_string() const;

 private:
  std::uint32_t bits_ = 0;
};

struct FullType;

// Intersection type: ground `o`, or T -> tau with T a set of full types.
class IType {
 public:
  IType() = default;  // o
  static IType arrow(std::vector<FullType> args, IType result);

  bool is_ground() const { return node_ == nullptr; }
  const std::vector<FullType>& args() const;  // sorted, no duplicates
  const IType& result() const;
  std::size_t hash() const;

  friend bool operator==(const IType& a, const IType& b);
  friend std::strong_ordering operator<=>(const IType& a, const IType& b);

  struct Node;

 private:
  std::shared_ptr<const Node> node_;
};

struct FullType {
  unsigned order = 0;
  OrderSet flags, markers;
  IType type;

  friend bool operator==(const FullType& a, const FullType& b);
  friend std::strong_ordering operator<=>(const FullType& a, const FullType& b);
  std::size_t hash() const;
};

// rho_m = (m, {}, {0..m-1}, o)
FullType rho(unsigned m);

bool fits(const IType& t, const Sort& s);
// All invariants of a member of F^sort_k with k = t.order.
bool valid_full_type(const FullType& t, const Sort& s);

std::string to_string(const IType& t);
std::string to_string(const FullType& t);

// Environment over de Bruijn indices; entries are sorted and never empty.
class TypeEnv {
 public:
  using Entry = std::pair<std::uint32_t, std::vector<FullType>>;

  TypeEnv() = default;
  static TypeEnv single(std::uint32_t var, const FullType& t);

  const std::vector<FullType>& at(std::uint32_t var) const;
  bool has(std::uint32_t var, const FullType& t) const;
  void add(std::uint32_t var, const FullType& t);
  void add_all(const TypeEnv& other);
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }

  // Environment seen from outside a binder: drops index 0 and lowers the rest.
  TypeEnv unbind() const;
  // The reverse: raises every index by one (index 0 left empty).
  TypeEnv bind() const;

  bool subset_of(const TypeEnv& other) const;

  friend bool operator==(const TypeEnv&, const TypeEnv&) = default;
  friend auto operator<=>(const TypeEnv& a, const TypeEnv& b) { return a.entries_ <=> b.entries_; }
  std::size_t hash() const;

 private:
  std::vector<Entry> entries_;
};

// Printing an environment uses variable names recovered from the subject.
std::string to_string(const TypeEnv& env, const std::function<std::string(std::uint32_t)>& name);
std::string to_string(const TypeEnv& env);

OrderSet markers_of(const FullType& t);
OrderSet markers_of(const std::vector<FullType>& ts);
OrderSet markers_of(const TypeEnv& env);

struct Judgment {
  TypeEnv env;
  TermId subject = 0;
  FullType type;
  unsigned counter = 0;

  friend bool operator==(const Judgment&, const Judgment&) = default;
};

struct JudgmentClass {
  TypeEnv env;
  TermId subject = 0;
  FullType type;

  friend bool operator==(const JudgmentClass&, const JudgmentClass&) = default;
  friend auto operator<=>(const JudgmentClass& a, const JudgmentClass& b) {
    if (auto c = a.subject <=> b.subject; c != 0) return c;
    if (auto c = a.type <=> b.type; c != 0) return c;
    return a.env <=> b.env;
  }
  std::size_t hash() const;
};

JudgmentClass class_of(const Judgment& j);

std::string to_string(const TermStore& store, const JudgmentClass& c);
std::string to_string(const TermStore& store, const Judgment& j);

class PreconditionViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CompInput {
  OrderSet flags;
  unsigned counter = 0;
};

struct CompResult {
  OrderSet flags;
  unsigned counter = 0;
  friend bool operator==(const CompResult&, const CompResult&) = default;
};

// Comp_m(M; (F_i, c_i)_i). Throws PreconditionViolation unless M is within
// {0..m-1} and every F_i within {0..m}.
CompResult comp(unsigned m, OrderSet markers, const std::vector<CompInput>& inputs);

bool split(const TypeEnv& whole, const std::vector<TypeEnv>& parts);

struct EnumerationStats {
  std::size_t yielded = 0;
  bool truncated = false;
};

// Members of F^sort_k in a fixed order; stops after `limit` results. The
// callback may return false to stop early.
EnumerationStats enumerate_full_types(const Sort& sort, unsigned k, std::size_t limit,
                                      const std::function<bool(const FullType&)>& yield);

// As above but collects everything and throws ResourceLimit on truncation.
std::vector<FullType> all_full_types(const Sort& sort, unsigned k, std::size_t limit);

}  // namespace hofin

template <>
struct std::hash<hofin::FullType> {
  std::size_t operator()(const hofin::FullType& t) const noexcept { return t.hash(); }
};
template <>
struct std::hash<hofin::JudgmentClass> {
  std::size_t operator()(const hofin::JudgmentClass& c) const noexcept { return c.hash(); }
};
