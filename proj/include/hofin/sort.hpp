#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <string>

namespace hofin {

// Simple type over the single ground sort `o`. Immutable and cheap to copy;
// equality is structural.
class Sort {
 public:
  Sort();  // ground

  static Sort ground() { return Sort(); }
  static Sort arrow(const Sort& argument, const Sort& result);

  bool is_ground() const;
  const Sort& argument() const;
  const Sort& result() const;

  // ord(o) = 0, ord(a -> b) = max(1 + ord(a), ord(b))
  unsigned order() const;
  std::size_t hash() const;

  // Number of arguments until the ground result, e.g. 2 for o -> o -> o.
  unsigned arity() const;

  std::string to_string() const;

  friend bool operator==(const Sort& a, const Sort& b);
  friend std::strong_ordering operator<=>(const Sort& a, const Sort& b);

  struct Node;

 private:
  explicit Sort(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

inline unsigned ord_sort(const Sort& s) { return s.order(); }

}  // namespace hofin

template <>
struct std::hash<hofin::Sort> {
  std::size_t operator()(const hofin::Sort& s) const noexcept { return s.hash(); }
};
