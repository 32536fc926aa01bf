#include "hofin/sort.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace hofin {

struct Sort::Node {
  std::optional<Sort> argument;  // empty for ground
  std::optional<Sort> result;
  unsigned order = 0;
  std::size_t hash = 0x9e3779b9u;
};

namespace {

const std::shared_ptr<const Sort::Node>& ground_node() {
  static const auto node = std::make_shared<const Sort::Node>();
  return node;
}

std::strong_ordering compare_nodes(const Sort::Node* a, const Sort::Node* b) {
  if (a == b) return std::strong_ordering::equal;
  const bool ga = !a->argument, gb = !b->argument;
  if (ga || gb) return gb <=> ga;  // ground sorts first
  if (auto c = *a->argument <=> *b->argument; c != 0) return c;
  return *a->result <=> *b->result;
}

}  // namespace

Sort::Sort() : node_(ground_node()) {}

Sort Sort::arrow(const Sort& argument, const Sort& result) {
  auto n = std::make_shared<Node>();
  n->argument = argument;
  n->result = result;
  n->order = std::max(1 + argument.node_->order, result.node_->order);
  n->hash = (argument.node_->hash * 1000003u) ^ (result.node_->hash + 0x7f4a7c15u + (n->order << 6));
  return Sort(std::shared_ptr<const Node>(std::move(n)));
}

bool Sort::is_ground() const { return !node_->argument; }

const Sort& Sort::argument() const {
  if (is_ground()) throw std::logic_error("ground sort has no argument");
  return *node_->argument;
}

const Sort& Sort::result() const {
  if (is_ground()) throw std::logic_error("ground sort has no result");
  return *node_->result;
}

unsigned Sort::order() const { return node_->order; }

std::size_t Sort::hash() const { return node_->hash; }

unsigned Sort::arity() const {
  unsigned n = 0;
  for (const Node* p = node_.get(); p->argument; p = p->result->node_.get()) ++n;
  return n;
}

std::string Sort::to_string() const {
  if (is_ground()) return "o";
  std::string lhs = argument().to_string();
  if (!argument().is_ground()) lhs = "(" + lhs + ")";
  return lhs + " -> " + result().to_string();
}

bool operator==(const Sort& a, const Sort& b) {
  return a.node_ == b.node_ || (a.node_->hash == b.node_->hash && compare_nodes(a.node_.get(), b.node_.get()) == 0);
}

std::strong_ordering operator<=>(const Sort& a, const Sort& b) {
  return compare_nodes(a.node_.get(), b.node_.get());
}

}  // namespace hofin
