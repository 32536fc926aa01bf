#include "hofin/oracle.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace hofin {

std::strong_ordering RankedTree::operator<=>(const RankedTree& o) const {
  if (auto c = label <=> o.label; c != 0) return c;
  return std::lexicographical_compare_three_way(children.begin(), children.end(), o.children.begin(),
                                                o.children.end());
}

std::size_t tree_size(const RankedTree& t) {
  std::size_t n = 1;
  for (const auto& c : t.children) n += tree_size(c);
  return n;
}

std::string to_string(const RankedTree& t) {
  std::string s = t.label;
  if (t.children.empty()) return s;
  s += '(';
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    if (i) s += ',';
    s += to_string(t.children[i]);
  }
  return s + ')';
}

std::set<std::size_t> LanguageSample::sizes() const {
  std::set<std::size_t> out;
  for (const auto& t : trees) out.insert(tree_size(t));
  return out;
}

namespace {

std::uint32_t free_limit(const TermStore& s, TermId t) {
  return static_cast<std::uint32_t>(s.node(t).free_sorts.size());
}

TermId rebuild(TermStore& s, TermId t, const std::vector<TermId>& kids) {
  const TermNode n = s.node(t);
  switch (n.kind) {
    case TermKind::Symbol: return s.make_symbol(n.symbol, kids);
    case TermKind::App: return s.make_app(kids[0], kids[1]);
    case TermKind::Abs: return s.make_abs(n.binder, kids[0], n.hint);
    case TermKind::Var: break;
  }
  return t;
}

class Shifter {
 public:
  Shifter(TermStore& s, std::uint32_t by) : s_(s), by_(by) {}
  TermId run(TermId t, std::uint32_t cutoff) {
    if (by_ == 0 || free_limit(s_, t) <= cutoff) return t;
    const auto key = std::make_pair(t, cutoff);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const TermNode& n = s_.node(t);
    TermId out;
    if (n.kind == TermKind::Var) {
      const Sort sort = n.sort;
      const std::string hint = n.hint;
      out = s_.make_var(n.index + by_, sort, hint);
    } else {
      std::vector<TermId> kids = s_.children(t);
      const std::uint32_t inner = n.kind == TermKind::Abs ? cutoff + 1 : cutoff;
      for (auto& k : kids) k = run(k, inner);
      out = rebuild(s_, t, kids);
    }
    memo_[key] = out;
    return out;
  }

 private:
  TermStore& s_;
  std::uint32_t by_;
  std::map<std::pair<TermId, std::uint32_t>, TermId> memo_;
};

class Substituter {
 public:
  Substituter(TermStore& s, std::uint32_t index, TermId value) : s_(s), index_(index), value_(value) {}

  TermId run(TermId t, std::uint32_t depth) {
    const std::uint32_t target = index_ + depth;
    if (free_limit(s_, t) <= target) return t;
    const auto key = std::make_pair(t, depth);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const TermNode& n = s_.node(t);
    TermId out;
    if (n.kind == TermKind::Var) {
      if (n.index == target) {
        out = Shifter(s_, depth).run(value_, 0);
      } else {
        const Sort sort = n.sort;
        const std::string hint = n.hint;
        out = s_.make_var(n.index - 1, sort, hint);
      }
    } else {
      std::vector<TermId> kids = s_.children(t);
      const std::uint32_t inner = n.kind == TermKind::Abs ? depth + 1 : depth;
      for (auto& k : kids) k = run(k, inner);
      out = rebuild(s_, t, kids);
    }
    memo_[key] = out;
    return out;
  }

 private:
  TermStore& s_;
  std::uint32_t index_;
  TermId value_;
  std::map<std::pair<TermId, std::uint32_t>, TermId> memo_;
};

}  // namespace

TermId substitute(TermStore& store, TermId term, std::uint32_t index, TermId value) {
  const auto& fs = store.node(term).free_sorts;
  if (index < fs.size() && fs[index] && !(*fs[index] == store.sort_of(value)))
    throw SortMismatch("substituting a term of sort " + store.sort_of(value).to_string() +
                       " for a variable of sort " + fs[index]->to_string());
  return Substituter(store, index, value).run(term, 0);
}

HeadForm head_reduce(TermStore& store, TermId t, unsigned max_steps) {
  HeadForm out;
  std::unordered_set<TermId> seen;
  TermId cur = t;
  while (true) {
    std::vector<TermId> args;
    TermId head = cur;
    while (store.node(head).kind == TermKind::App) {
      args.push_back(store.node(head).arg);
      head = store.node(head).fn;
    }
    const TermNode& h = store.node(head);
    if (h.kind == TermKind::Symbol) {
      out.kind = HeadForm::Kind::Constructor;
      out.symbol = h.symbol;
      out.args = h.args;
      return out;
    }
    if (h.kind != TermKind::Abs) throw SortMismatch("head reduction reached a free variable");
    if (!seen.insert(cur).second) {
      out.proven = true;
      return out;
    }
    if (out.steps >= max_steps) return out;
    ++out.steps;
    // args holds operands innermost-last
    const TermId operand = args.back();
    args.pop_back();
    TermId next = substitute(store, h.body, 0, operand);
    for (auto it = args.rbegin(); it != args.rend(); ++it) next = store.make_app(next, *it);
    cur = next;
  }
}

namespace {

struct Result {
  std::set<RankedTree> trees;
  bool step_cut = false;
  bool size_cut = false;
  // Shallowest in-progress entry this result depended on; such results are
  // only final once that entry is done.
  std::size_t low = kNone;
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  unsigned steps_needed = 0;
  unsigned computed_with = 0;
};

class Enumerator {
 public:
  Enumerator(TermStore& s, const Budget& b) : s_(s), budget_(b) {}

  Result gen(TermId t, unsigned limit, unsigned remaining) {
    const auto key = std::make_pair(t, limit);
    if (auto it = memo_.find(key); it != memo_.end()) {
      const Result& r = it->second;
      if ((!r.step_cut && r.steps_needed <= remaining) || (r.step_cut && r.computed_with == remaining)) return r;
    }
    if (auto it = active_.find(key); it != active_.end()) {
      Result r;
      r.low = it->second;
      return r;
    }
    const std::size_t depth = active_.size();
    active_.emplace(key, depth);
    Result r = expand(t, limit, remaining);
    active_.erase(key);
    r.computed_with = remaining;
    if (r.low >= depth) r.low = Result::kNone;
    if (r.low == Result::kNone) memo_[key] = r;
    return r;
  }

  std::size_t diverged = 0;

 private:
  HeadForm head(TermId t, unsigned remaining) {
    if (auto it = heads_.find(t); it != heads_.end()) {
      const HeadForm& h = it->second;
      if (h.kind == HeadForm::Kind::Constructor || h.proven) return h;
      if (h.steps >= remaining) return h;
    }
    HeadForm h = head_reduce(s_, t, remaining);
    heads_[t] = h;
    return h;
  }

  Result expand(TermId t, unsigned limit, unsigned remaining) {
    Result r;
    const HeadForm h = head(t, remaining);
    if (h.kind == HeadForm::Kind::Diverged) {
      if (h.proven)
        ++diverged;
      else
        r.step_cut = true;
      r.steps_needed = h.steps;
      return r;
    }
    const unsigned left = remaining - h.steps;
    if (h.symbol == kBr) {
      for (TermId child : h.args) merge(r, gen(child, limit, left));
      r.steps_needed += h.steps;
      return r;
    }
    const std::size_t rank = h.args.size();
    if (limit < 1 + rank) {
      r.size_cut = true;
      return r;
    }
    const unsigned child_limit = static_cast<unsigned>(limit - rank);  // others take at least one node each
    std::vector<std::vector<RankedTree>> options;
    for (TermId child : h.args) {
      Result c = gen(child, child_limit, left);
      r.step_cut |= c.step_cut;
      r.size_cut |= c.size_cut;
      r.low = std::min(r.low, c.low);
      r.steps_needed = std::max(r.steps_needed, c.steps_needed);
      options.emplace_back(c.trees.begin(), c.trees.end());
    }
    r.steps_needed += h.steps;
    const std::string& label = s_.symbol(h.symbol).name;
    std::vector<RankedTree> chosen;
    combine(options, 0, limit - 1, label, chosen, r);
    return r;
  }

  void combine(const std::vector<std::vector<RankedTree>>& options, std::size_t i, std::size_t room,
               const std::string& label, std::vector<RankedTree>& chosen, Result& r) {
    if (i == options.size()) {
      r.trees.insert(RankedTree{label, chosen});
      return;
    }
    const std::size_t reserve = options.size() - i - 1;
    for (const auto& t : options[i]) {
      const std::size_t sz = tree_size(t);
      if (sz + reserve > room) {
        r.size_cut = true;
        continue;
      }
      chosen.push_back(t);
      combine(options, i + 1, room - sz, label, chosen, r);
      chosen.pop_back();
    }
  }

  static void merge(Result& into, const Result& from) {
    into.trees.insert(from.trees.begin(), from.trees.end());
    into.step_cut |= from.step_cut;
    into.size_cut |= from.size_cut;
    into.low = std::min(into.low, from.low);
    into.steps_needed = std::max(into.steps_needed, from.steps_needed);
  }

  TermStore& s_;
  Budget budget_;
  std::map<std::pair<TermId, unsigned>, Result> memo_;
  std::map<std::pair<TermId, unsigned>, std::size_t> active_;
  std::unordered_map<TermId, HeadForm> heads_;
};

}  // namespace

LanguageSample enumerate_language(TermStore& store, TermId t, const Budget& budget) {
  if (!store.is_closed(t) || !store.sort_of(t).is_ground())
    throw SortMismatch("the oracle expects a closed term of sort o");
  Enumerator e(store, budget);
  Result r = e.gen(t, budget.max_tree_size, budget.max_beta_steps);
  LanguageSample out;
  out.trees = std::move(r.trees);
  out.step_cut = r.step_cut;
  out.size_cut = r.size_cut;
  out.complete = !r.step_cut && !r.size_cut;
  out.diverged_branches = e.diverged;
  for ([[maybe_unused]] const auto& tree : out.trees) {
    std::vector<const RankedTree*> stack{&tree};
    while (!stack.empty()) {
      const RankedTree* n = stack.back();
      stack.pop_back();
      if (n->label == "br") throw std::logic_error("oracle emitted a br node");
      for (const auto& c : n->children) stack.push_back(&c);
    }
  }
  return out;
}

}  // namespace hofin
