#include "hofin/term.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace hofin {

namespace {

void merge_free(std::vector<std::optional<Sort>>& into, const std::vector<std::optional<Sort>>& from,
                std::uint32_t drop) {
  for (std::size_t i = drop; i < from.size(); ++i) {
    if (!from[i]) continue;
    const std::size_t j = i - drop;
    if (into.size() <= j) into.resize(j + 1);
    if (into[j] && !(*into[j] == *from[i]))
      throw TermError("variable #" + std::to_string(j) + " used at sorts " + into[j]->to_string() + " and " +
                      from[i]->to_string());
    into[j] = from[i];
  }
}

std::string key_of(const TermNode& n) {
  std::ostringstream k;
  switch (n.kind) {
    case TermKind::Symbol:
      k << 'S' << n.symbol;
      for (TermId a : n.args) k << ',' << a;
      break;
    case TermKind::Var:
      k << 'V' << n.index << ':' << n.sort.to_string();
      break;
    case TermKind::App:
      k << 'A' << n.fn << ',' << n.arg;
      break;
    case TermKind::Abs:
      k << 'L' << n.binder.to_string() << ':' << n.body;
      break;
  }
  return k.str();
}

}  // namespace

TermStore::TermStore() { declare_symbol("br", 2); }

SymbolId TermStore::declare_symbol(const std::string& name, unsigned rank) {
  if (auto it = symbol_index_.find(name); it != symbol_index_.end()) {
    if (symbols_[it->second].rank != rank) throw TermError("symbol " + name + " redeclared with a different rank");
    return it->second;
  }
  symbols_.push_back({name, rank});
  const auto id = static_cast<SymbolId>(symbols_.size() - 1);
  symbol_index_.emplace(name, id);
  return id;
}

std::optional<SymbolId> TermStore::find_symbol(const std::string& name) const {
  if (auto it = symbol_index_.find(name); it != symbol_index_.end()) return it->second;
  return std::nullopt;
}

TermId TermStore::intern(TermNode node, const std::string& key) {
  if (auto it = table_.find(key); it != table_.end()) return it->second;
  nodes_.push_back(std::move(node));
  filled_.push_back(true);
  const auto id = static_cast<TermId>(nodes_.size() - 1);
  table_.emplace(key, id);
  return id;
}

TermId TermStore::make_symbol(SymbolId symbol, std::vector<TermId> args) {
  const SymbolInfo& info = symbols_.at(symbol);
  if (args.size() != info.rank)
    throw TermError("symbol " + info.name + " of rank " + std::to_string(info.rank) + " applied to " +
                    std::to_string(args.size()) + " arguments");
  TermNode n;
  n.kind = TermKind::Symbol;
  n.symbol = symbol;
  for (TermId a : args) {
    if (!nodes_.at(a).sort.is_ground())
      throw TermError("argument of " + info.name + " has sort " + nodes_[a].sort.to_string());
    merge_free(n.free_sorts, nodes_[a].free_sorts, 0);
  }
  n.args = std::move(args);
  const std::string key = key_of(n);
  return intern(std::move(n), key);
}

TermId TermStore::make_var(std::uint32_t index, const Sort& sort, std::string hint) {
  TermNode n;
  n.kind = TermKind::Var;
  n.index = index;
  n.sort = sort;
  n.hint = std::move(hint);
  n.free_sorts.resize(index + 1);
  n.free_sorts[index] = sort;
  const std::string key = key_of(n);
  return intern(std::move(n), key);
}

TermId TermStore::make_app(TermId fn, TermId arg) {
  const Sort& fs = nodes_.at(fn).sort;
  const Sort& as = nodes_.at(arg).sort;
  if (fs.is_ground()) throw TermError("applying a term of sort o");
  if (!(fs.argument() == as))
    throw TermError("operator expects " + fs.argument().to_string() + " but operand has sort " + as.to_string());
  TermNode n;
  n.kind = TermKind::App;
  n.fn = fn;
  n.arg = arg;
  n.sort = fs.result();
  merge_free(n.free_sorts, nodes_[fn].free_sorts, 0);
  merge_free(n.free_sorts, nodes_[arg].free_sorts, 0);
  const std::string key = key_of(n);
  return intern(std::move(n), key);
}

TermId TermStore::make_abs(const Sort& binder, TermId body, std::string hint) {
  TermNode n;
  n.kind = TermKind::Abs;
  n.binder = binder;
  n.body = body;
  n.hint = std::move(hint);
  n.sort = Sort::arrow(binder, nodes_.at(body).sort);
  const auto& bf = nodes_[body].free_sorts;
  if (!bf.empty() && bf[0] && !(*bf[0] == binder))
    throw TermError("bound variable used at sort " + bf[0]->to_string() + " but declared " + binder.to_string());
  merge_free(n.free_sorts, bf, 1);
  const std::string key = key_of(n);
  return intern(std::move(n), key);
}

TermId TermStore::reserve_knot(const std::string& name, const Sort& sort) {
  TermNode n;
  n.sort = sort;
  n.name = name;
  n.knot = true;
  nodes_.push_back(std::move(n));
  filled_.push_back(false);
  return static_cast<TermId>(nodes_.size() - 1);
}

bool TermStore::is_filled(TermId knot) const { return filled_.at(knot); }

void TermStore::fill_knot(TermId knot, TermId body) {
  if (!nodes_.at(knot).knot || filled_[knot]) throw TermError("not an open knot");
  if (knot == body) throw TermError("nonterminal " + nodes_[knot].name + " is defined as itself");
  if (!filled_.at(body)) throw TermError("knot body is an unfilled knot");
  TermNode copy = nodes_[body];
  if (!(copy.sort == nodes_[knot].sort))
    throw TermError("nonterminal " + nodes_[knot].name + " declared " + nodes_[knot].sort.to_string() +
                    " but body has sort " + copy.sort.to_string());
  if (!copy.free_sorts.empty()) throw TermError("nonterminal " + nodes_[knot].name + " has a free variable");
  copy.name = nodes_[knot].name;
  copy.knot = true;
  const std::string key = key_of(copy);
  nodes_[knot] = std::move(copy);
  filled_[knot] = true;
  table_[key] = knot;
}

bool TermStore::has_free(TermId id, std::uint32_t index) const {
  const auto& fs = nodes_.at(id).free_sorts;
  return index < fs.size() && fs[index].has_value();
}

std::vector<TermId> TermStore::children(TermId id) const {
  const TermNode& n = nodes_.at(id);
  switch (n.kind) {
    case TermKind::Symbol: return n.args;
    case TermKind::Var: return {};
    case TermKind::App: return {n.fn, n.arg};
    case TermKind::Abs: return {n.body};
  }
  return {};
}

namespace {

void print(const TermStore& s, TermId id, bool top, std::ostringstream& out, bool parens) {
  const TermNode& n = s.node(id);
  if (n.knot && !top) {
    out << n.name;
    return;
  }
  switch (n.kind) {
    case TermKind::Var:
      if (n.hint.empty())
        out << '#' << n.index;
      else
        out << n.hint;
      return;
    case TermKind::Symbol:
      if (n.args.empty()) {
        out << s.symbol(n.symbol).name;
        return;
      }
      if (parens) out << '(';
      out << s.symbol(n.symbol).name;
      for (TermId a : n.args) {
        out << ' ';
        print(s, a, false, out, true);
      }
      if (parens) out << ')';
      return;
    case TermKind::App: {
      if (parens) out << '(';
      const bool fn_abs = s.node(n.fn).kind == TermKind::Abs && !s.node(n.fn).knot;
      if (fn_abs) out << '(';
      print(s, n.fn, false, out, false);
      if (fn_abs) out << ')';
      out << ' ';
      print(s, n.arg, false, out, true);
      if (parens) out << ')';
      return;
    }
    case TermKind::Abs:
      if (parens) out << '(';
      out << '\\' << (n.hint.empty() ? "_" : n.hint) << ". ";
      print(s, n.body, false, out, false);
      if (parens) out << ')';
      return;
  }
}

}  // namespace

std::string TermStore::to_string(TermId id) const {
  std::ostringstream out;
  print(*this, id, true, out, false);
  return out.str();
}

std::vector<TermId> subterm_universe(const TermStore& store, TermId root) {
  std::vector<TermId> order;
  std::set<TermId> seen{root};
  std::deque<TermId> queue{root};
  while (!queue.empty()) {
    TermId id = queue.front();
    queue.pop_front();
    order.push_back(id);
    for (TermId c : store.children(id))
      if (seen.insert(c).second) queue.push_back(c);
  }
  return order;
}

unsigned complexity(const TermStore& store, TermId root) {
  unsigned m = 0;
  for (TermId id : subterm_universe(store, root)) m = std::max(m, store.sort_of(id).order());
  return m;
}

bool bisimilar(const TermStore& sa, TermId a, const TermStore& sb, TermId b) {
  // Greatest fixpoint: assume pairs under comparison are related.
  std::set<std::pair<TermId, TermId>> assumed;
  std::vector<std::pair<TermId, TermId>> todo{{a, b}};
  while (!todo.empty()) {
    auto [x, y] = todo.back();
    todo.pop_back();
    if (!assumed.insert({x, y}).second) continue;
    const TermNode& nx = sa.node(x);
    const TermNode& ny = sb.node(y);
    if (nx.kind != ny.kind || !(nx.sort == ny.sort)) return false;
    switch (nx.kind) {
      case TermKind::Symbol:
        if (sa.symbol(nx.symbol).name != sb.symbol(ny.symbol).name || nx.args.size() != ny.args.size()) return false;
        for (std::size_t i = 0; i < nx.args.size(); ++i) todo.emplace_back(nx.args[i], ny.args[i]);
        break;
      case TermKind::Var:
        if (nx.index != ny.index) return false;
        break;
      case TermKind::App:
        todo.emplace_back(nx.fn, ny.fn);
        todo.emplace_back(nx.arg, ny.arg);
        break;
      case TermKind::Abs:
        if (!(nx.binder == ny.binder)) return false;
        todo.emplace_back(nx.body, ny.body);
        break;
    }
  }
  return true;
}

}  // namespace hofin
