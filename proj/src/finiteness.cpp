#include "hofin/finiteness.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace hofin {

JudgmentClass root_goal(const TermStore& store, TermId root) {
  if (!store.is_closed(root) || !store.sort_of(root).is_ground())
    throw PreconditionViolation("root_goal: the root must be closed and of sort o");
  return JudgmentClass{TypeEnv(), root, rho(complexity(store, root))};
}

const char* to_string(Decision::Answer a) {
  switch (a) {
    case Decision::Answer::Finite: return "finite";
    case Decision::Answer::Infinite: return "infinite";
    case Decision::Answer::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

enum class Role { BrChild, ConArg, AppFn, AppArg, AbsBody };

struct Parent {
  TermId node;
  Role role;
  unsigned index;
};

using ProdKey = std::tuple<Rule, std::vector<ClassId>, unsigned, std::uint32_t, FullType>;

ProdKey key_of(const Production& p) {
  return {p.rule, p.premisses, p.branch, p.leaf_markers.bits(), p.stored};
}

struct ClassInfo {
  JudgmentClass cls;
  std::vector<Production> prods;
  std::vector<unsigned> pending;  // per production: premiss slots not yet derivable
  std::set<ProdKey> keys;
  bool live = false;
};

// Γ1 ⊊ Γ2 and everything only in Γ2 is markerless.
bool strictly_weaker(const TypeEnv& a, const TypeEnv& b) {
  if (a == b || !a.subset_of(b)) return false;
  for (const auto& [v, ts] : b.entries())
    for (const auto& t : ts)
      if (!t.markers.empty() && !a.has(v, t)) return false;
  return true;
}

constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();

}  // namespace

struct JudgmentGraph::Impl {
  const TermStore& store;
  TermId root;
  SearchConfig cfg;
  unsigned m = 0;
  GraphStats stats;

  std::vector<TermId> universe;
  std::unordered_map<TermId, std::vector<Parent>> parents;
  std::map<Sort, std::vector<TermId>> vars_by_binder;

  std::vector<ClassInfo> classes;
  std::unordered_map<JudgmentClass, ClassId> index;
  std::vector<std::vector<std::pair<ClassId, unsigned>>> dependents;
  std::unordered_map<TermId, std::vector<ClassId>> live_at;
  std::map<std::pair<TermId, FullType>, std::vector<ClassId>> groups;

  std::map<Sort, std::set<FullType>> cand;
  std::map<std::pair<TermId, unsigned>, std::map<FullType, std::vector<ClassId>>> operand_index;
  std::map<TermId, std::set<FullType>> extension_pool;  // Abs node -> markerless extras for its binder
  std::deque<ClassId> agenda;

  // analysis
  std::vector<std::uint64_t> min;
  std::vector<int> min_prod;
  mutable std::vector<DerivationPtr> min_cache;
  std::vector<int> scc;

  Impl(const TermStore& s, TermId r, const SearchConfig& c) : store(s), root(r), cfg(c) {}

  void truncate(const std::string& why) {
    if (std::find(stats.truncation_reasons.begin(), stats.truncation_reasons.end(), why) ==
        stats.truncation_reasons.end())
      stats.truncation_reasons.push_back(why);
    stats.truncated = true;
    if (cfg.exhaustive) throw ResourceLimit("exhaustive saturation truncated: " + why);
  }

  // ---- setup ----

  void index_universe() {
    universe = subterm_universe(store, root);
    m = complexity(store, root);
    for (TermId n : universe) {
      const TermNode& node = store.node(n);
      switch (node.kind) {
        case TermKind::Symbol:
          for (unsigned i = 0; i < node.args.size(); ++i)
            parents[node.args[i]].push_back({n, node.symbol == kBr ? Role::BrChild : Role::ConArg, i});
          break;
        case TermKind::App:
          parents[node.fn].push_back({n, Role::AppFn, 0});
          parents[node.arg].push_back({n, Role::AppArg, 0});
          break;
        case TermKind::Abs: parents[node.body].push_back({n, Role::AbsBody, 0}); break;
        case TermKind::Var: break;
      }
    }
    for (TermId n : universe) {
      const TermNode& node = store.node(n);
      if (node.kind != TermKind::Abs) continue;
      std::set<std::pair<TermId, std::uint32_t>> seen;
      std::vector<std::pair<TermId, std::uint32_t>> stack{{node.body, 0}};
      std::set<TermId> bound;
      while (!stack.empty()) {
        auto [t, d] = stack.back();
        stack.pop_back();
        if (store.node(t).free_sorts.size() <= d || !seen.insert({t, d}).second) continue;
        const TermNode& tn = store.node(t);
        if (tn.kind == TermKind::Var) {
          if (tn.index == d) bound.insert(t);
          continue;
        }
        const std::uint32_t inner = tn.kind == TermKind::Abs ? d + 1 : d;
        for (TermId c : store.children(t)) stack.push_back({c, inner});
      }
      auto& vs = vars_by_binder[node.sort];
      for (TermId v : bound)
        if (std::find(vs.begin(), vs.end(), v) == vs.end()) vs.push_back(v);
    }
  }

  // ---- class table ----

  std::optional<ClassId> ensure(const JudgmentClass& c) {
    if (auto it = index.find(c); it != index.end()) return it->second;
    if (classes.size() >= cfg.max_judgment_classes) {
      truncate("max_judgment_classes reached");
      return std::nullopt;
    }
    const ClassId id = static_cast<ClassId>(classes.size());
    classes.push_back(ClassInfo{c, {}, {}, {}, false});
    dependents.emplace_back();
    index.emplace(c, id);
    auto& group = groups[{c.subject, c.type}];
    const std::vector<ClassId> others = group;
    group.push_back(id);
    for (ClassId x : others) {
      if (!strictly_weaker(classes[x].cls.env, c.env)) continue;
      const std::vector<Production> own = own_productions(x);
      for (const auto& p : own) copy_into(p, id);
    }
    return id;
  }

  std::vector<Production> own_productions(ClassId x) const {
    std::vector<Production> out;
    for (const auto& p : classes[x].prods)
      if (!p.copied) out.push_back(p);
    return out;
  }

  void copy_into(Production p, ClassId target) {
    p.copied = true;
    if (p.rule == Rule::BR) {
      const JudgmentClass& premiss = classes[p.premisses[0]].cls;
      auto w = ensure(JudgmentClass{classes[target].cls.env, premiss.subject, premiss.type});
      if (!w) return;
      p.premisses[0] = *w;
    }
    add(target, std::move(p));
  }

  void add(const JudgmentClass& c, Production p) {
    if (auto id = ensure(c)) add(*id, std::move(p));
  }

  void add(ClassId id, Production p) {
    if (!classes[id].keys.insert(key_of(p)).second) return;
    unsigned pending = 0;
    for (ClassId q : p.premisses)
      if (!classes[q].live) ++pending;
    const unsigned pi = static_cast<unsigned>(classes[id].prods.size());
    for (ClassId q : p.premisses)
      if (!classes[q].live) dependents[q].push_back({id, pi});
    const bool own = !p.copied;
    classes[id].prods.push_back(p);
    classes[id].pending.push_back(pending);
    if (pending == 0) make_live(id);
    if (!own) return;
    const JudgmentClass c = classes[id].cls;
    const std::vector<ClassId> group = groups[{c.subject, c.type}];
    for (ClassId y : group)
      if (strictly_weaker(c.env, classes[y].cls.env)) copy_into(p, y);
  }

  void make_live(ClassId id) {
    if (classes[id].live) return;
    classes[id].live = true;
    agenda.push_back(id);
  }

  // ---- saturation ----

  void seed() {
    if (cfg.exhaustive) {
      for (TermId n : universe) {
        const TermNode& node = store.node(n);
        if (node.kind != TermKind::Abs) continue;
        const unsigned k = node.sort.order();
        const auto all = all_full_types(node.binder, k, cfg.fulltype_enumeration_limit);
        for (const auto& t : all) {
          add_cand(node.sort, t);
          if (t.markers.empty()) extension_pool[n].insert(t);
        }
        // every live body class is weakened by each subset of the pool
        const std::size_t pool = extension_pool[n].size();
        if (pool >= 63 || (std::size_t{1} << pool) > cfg.max_judgment_classes)
          throw ResourceLimit("exhaustive saturation needs 2^" + std::to_string(pool) +
                              " environments for one binder, above max_judgment_classes");
      }
    }
    for (TermId n : universe) {
      const TermNode& node = store.node(n);
      if (node.kind != TermKind::Symbol || node.symbol == kBr || !node.args.empty()) continue;
      for (std::uint32_t bits = 0; bits < (1u << m); ++bits) {
        const OrderSet mk(bits);
        const std::vector<CompInput> in{m == 0 ? CompInput{{}, 1} : CompInput{OrderSet{0}, 0}};
        const CompResult r = comp(m, mk, in);
        Production p;
        p.rule = Rule::CON;
        p.weight = r.counter;
        p.leaf_markers = mk;
        add(JudgmentClass{TypeEnv(), n, FullType{m, r.flags, mk, IType()}}, p);
      }
    }
  }

  void add_cand(const Sort& binder, const FullType& t) {
    if (!cand[binder].insert(t).second) return;
    auto it = vars_by_binder.find(binder);
    if (it == vars_by_binder.end()) return;
    const unsigned k = t.order;
    for (TermId v : it->second) {
      const TermNode& var = store.node(v);
      if (!valid_full_type(t, var.sort)) continue;
      for (std::uint32_t hi = 0; hi < (1u << (m - k)); ++hi) {
        const OrderSet mk = t.markers | OrderSet(hi << k);
        Production p;
        p.rule = Rule::VAR;
        p.leaf_markers = mk;
        p.stored = t;
        add(JudgmentClass{TypeEnv::single(var.index, t), v, FullType{m, t.flags, mk, t.type}}, p);
      }
    }
  }

  void run() {
    index_universe();
    seed();
    while (!agenda.empty()) {
      const ClassId x = agenda.front();
      agenda.pop_front();
      for (auto [c, pi] : dependents[x])
        if (--classes[c].pending[pi] == 0) make_live(c);
      dependents[x].clear();
      fire(x);
    }
  }

  void fire(ClassId x) {
    const JudgmentClass c = classes[x].cls;
    live_at[c.subject].push_back(x);
    auto pit = parents.find(c.subject);
    if (pit == parents.end()) return;
    const std::vector<Parent> ps = pit->second;
    for (const Parent& p : ps) {
      const TermNode& pn = store.node(p.node);
      switch (p.role) {
        case Role::BrChild: {
          Production prod;
          prod.rule = Rule::BR;
          prod.branch = p.index + 1;
          prod.premisses = {x};
          add(JudgmentClass{c.env, p.node, c.type}, prod);
          break;
        }
        case Role::ConArg: combine_con(p.node, x, p.index); break;
        case Role::AppFn: combine_app(p.node, x, std::nullopt); break;
        case Role::AppArg: {
          const unsigned k = store.sort_of(pn.fn).order();
          const FullType r = restrict_to_operator(c.type, k);
          operand_index[{c.subject, k}][r].push_back(x);
          if (!cfg.exhaustive) add_cand(store.sort_of(pn.fn), r);
          const std::vector<ClassId> ops = live_at[pn.fn];
          for (ClassId o : ops) combine_app(p.node, o, x);
          if (!cfg.exhaustive && store.node(pn.fn).kind == TermKind::Abs && r.markers.empty() &&
              extension_pool[pn.fn].insert(r).second) {
            const std::vector<ClassId> bodies = live_at[store.node(pn.fn).body];
            for (ClassId b : bodies) extend(b, r, store.node(pn.fn).binder);
          }
          break;
        }
        case Role::AbsBody: {
          lambda(p.node, x);
          auto pool = extension_pool.find(p.node);
          if (pool != extension_pool.end()) {
            const std::vector<FullType> extras(pool->second.begin(), pool->second.end());
            for (const auto& r : extras) extend(x, r, pn.binder);
          }
          break;
        }
      }
    }
  }

  // Weakens the body class by one more markerless type of the bound variable.
  void extend(ClassId body, const FullType& r, const Sort& binder) {
    if (!valid_full_type(r, binder)) return;
    const JudgmentClass c = classes[body].cls;
    if (c.env.has(0, r)) return;
    TypeEnv env = c.env;
    env.add(0, r);
    ensure(JudgmentClass{env, c.subject, c.type});
  }

  void lambda(TermId abs, ClassId x) {
    const TermNode& a = store.node(abs);
    const JudgmentClass& c = classes[x].cls;
    const std::vector<FullType>& bound = c.env.at(0);
    const unsigned k = a.sort.order();
    for (const auto& t : bound)
      if (t.order != k || !valid_full_type(t, a.binder)) return;
    Production p;
    p.rule = Rule::LAMBDA;
    p.premisses = {x};
    FullType t{m, c.type.flags, c.type.markers - markers_of(bound), IType::arrow(bound, c.type.type)};
    add(JudgmentClass{c.env.unbind(), abs, t}, p);
  }

  void combine_con(TermId node, ClassId fixed, unsigned pos) {
    const TermNode& n = store.node(node);
    std::vector<std::vector<ClassId>> options;
    for (unsigned i = 0; i < n.args.size(); ++i)
      options.push_back(i == pos ? std::vector<ClassId>{fixed} : live_at[n.args[i]]);
    std::vector<ClassId> chosen;
    std::function<void(unsigned, OrderSet)> go = [&](unsigned i, OrderSet mk) {
      if (i == options.size()) {
        TypeEnv env;
        std::vector<CompInput> in{m == 0 ? CompInput{{}, 1} : CompInput{OrderSet{0}, 0}};
        for (ClassId q : chosen) {
          env.add_all(classes[q].cls.env);
          in.push_back({classes[q].cls.type.flags, 0});
        }
        const CompResult r = comp(m, mk, in);
        Production p;
        p.rule = Rule::CON;
        p.premisses = chosen;
        p.weight = r.counter;
        add(JudgmentClass{env, node, FullType{m, r.flags, mk, IType()}}, p);
        return;
      }
      for (ClassId q : options[i]) {
        const OrderSet qm = classes[q].cls.type.markers;
        if (!qm.disjoint(mk)) continue;
        chosen.push_back(q);
        go(i + 1, mk | qm);
        chosen.pop_back();
      }
    };
    go(0, {});
  }

  static bool interesting(const FullType& t, unsigned k) {
    return !t.flags.restrict_from(k).empty() || !t.markers.restrict_from(k).empty();
  }

  void combine_app(TermId node, ClassId op, std::optional<ClassId> must) {
    const TermNode& n = store.node(node);
    const JudgmentClass oc = classes[op].cls;
    const unsigned k = store.sort_of(n.fn).order();
    const std::vector<FullType>& wanted = oc.type.type.args();
    auto& idx = operand_index[{n.arg, k}];
    std::vector<std::vector<ClassId>> options;
    for (const auto& t : wanted) {
      auto it = idx.find(t);
      if (it == idx.end()) return;
      options.push_back(it->second);
    }
    std::vector<ClassId> chosen;
    auto finish = [&](OrderSet mk) {
      if (must && std::find(chosen.begin(), chosen.end(), *must) == chosen.end()) return;
      TypeEnv env = oc.env;
      std::vector<CompInput> in{{oc.type.flags, 0}};
      for (ClassId q : chosen) {
        env.add_all(classes[q].cls.env);
        in.push_back({classes[q].cls.type.flags.restrict_from(k), 0});
      }
      const CompResult r = comp(m, mk, in);
      Production p;
      p.rule = Rule::APP;
      p.premisses.push_back(op);
      p.premisses.insert(p.premisses.end(), chosen.begin(), chosen.end());
      p.weight = r.counter;
      add(JudgmentClass{env, node, FullType{m, r.flags, mk, oc.type.type.result()}}, p);
    };
    // For each wanted type: a first premiss, then (for markerless types) any
    // further premisses that bring flags or markers of order >= k.
    std::function<void(std::size_t, std::size_t, OrderSet)> extras;
    std::function<void(std::size_t, OrderSet)> pick = [&](std::size_t i, OrderSet mk) {
      if (i == options.size()) {
        finish(mk);
        return;
      }
      for (std::size_t j = 0; j < options[i].size(); ++j) {
        const OrderSet qm = classes[options[i][j]].cls.type.markers;
        if (!qm.disjoint(mk)) continue;
        if (chosen.size() >= cfg.max_operand_premisses) {
          truncate("max_operand_premisses reached");
          return;
        }
        chosen.push_back(options[i][j]);
        if (wanted[i].markers.empty())
          extras(i, j + 1, mk | qm);
        else
          pick(i + 1, mk | qm);
        chosen.pop_back();
      }
    };
    extras = [&](std::size_t i, std::size_t from, OrderSet mk) {
      pick(i + 1, mk);
      for (std::size_t j = from; j < options[i].size(); ++j) {
        const JudgmentClass& q = classes[options[i][j]].cls;
        if (!interesting(q.type, k) || !q.type.markers.disjoint(mk)) continue;
        if (chosen.size() >= cfg.max_operand_premisses) {
          truncate("max_operand_premisses reached");
          return;
        }
        chosen.push_back(options[i][j]);
        extras(i, j + 1, mk | q.type.markers);
        chosen.pop_back();
      }
    };
    pick(0, oc.type.markers);
  }

  // ---- analysis ----

  bool ready(const Production& p) const {
    for (ClassId q : p.premisses)
      if (!classes[q].live) return false;
    return true;
  }

  void compute_min() {
    const std::size_t n = classes.size();
    min.assign(n, kInf);
    min_prod.assign(n, -1);
    min_cache.assign(n, nullptr);
    std::vector<std::vector<unsigned>> remaining(n);
    std::vector<std::vector<std::pair<ClassId, unsigned>>> users(n);
    using Item = std::tuple<std::uint64_t, ClassId, unsigned>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (ClassId c = 0; c < n; ++c) {
      if (!classes[c].live) continue;
      const auto& prods = classes[c].prods;
      remaining[c].assign(prods.size(), 0);
      for (unsigned pi = 0; pi < prods.size(); ++pi) {
        if (!ready(prods[pi])) continue;
        remaining[c][pi] = static_cast<unsigned>(prods[pi].premisses.size());
        for (ClassId q : prods[pi].premisses) users[q].push_back({c, pi});
        if (prods[pi].premisses.empty()) pq.push({prods[pi].weight, c, pi});
      }
    }
    std::vector<bool> done(n, false);
    while (!pq.empty()) {
      auto [v, c, pi] = pq.top();
      pq.pop();
      if (done[c]) continue;
      done[c] = true;
      min[c] = v;
      min_prod[c] = static_cast<int>(pi);
      for (auto [d, pj] : users[c]) {
        if (done[d] || --remaining[d][pj] != 0) continue;
        const Production& p = classes[d].prods[pj];
        std::uint64_t total = p.weight;
        for (ClassId q : p.premisses) total += min[q];
        pq.push({total, d, pj});
      }
    }
  }

  // Tarjan over derivable classes, premiss edges of ready productions.
  void compute_scc() {
    const std::size_t n = classes.size();
    scc.assign(n, -1);
    std::vector<int> low(n, 0), num(n, -1);
    std::vector<bool> on(n, false);
    std::vector<ClassId> stack;
    int counter = 0, comps = 0;
    auto succ = [&](ClassId c) {
      std::vector<ClassId> out;
      for (const auto& p : classes[c].prods)
        if (ready(p)) out.insert(out.end(), p.premisses.begin(), p.premisses.end());
      return out;
    };
    for (ClassId s = 0; s < n; ++s) {
      if (!classes[s].live || num[s] >= 0) continue;
      std::vector<std::pair<ClassId, std::vector<ClassId>>> frames;
      std::vector<std::size_t> pos;
      auto open = [&](ClassId c) {
        num[c] = low[c] = counter++;
        stack.push_back(c);
        on[c] = true;
        frames.push_back({c, succ(c)});
        pos.push_back(0);
      };
      open(s);
      while (!frames.empty()) {
        auto& [c, out] = frames.back();
        std::size_t& i = pos.back();
        if (i < out.size()) {
          const ClassId d = out[i++];
          if (num[d] < 0)
            open(d);
          else if (on[d])
            low[c] = std::min(low[c], num[d]);
          continue;
        }
        const ClassId done = c;
        if (low[done] == num[done]) {
          while (true) {
            const ClassId w = stack.back();
            stack.pop_back();
            on[w] = false;
            scc[w] = comps;
            if (w == done) break;
          }
          ++comps;
        }
        frames.pop_back();
        pos.pop_back();
        if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
      }
    }
  }

  DerivationPtr build(ClassId id, const Production& p, std::vector<DerivationPtr> premisses) const {
    const JudgmentClass& c = classes[id].cls;
    auto r = make_node(store, p.rule, c.subject, c.env, std::move(premisses), p.branch, p.leaf_markers, p.stored, m);
    if (!r.ok())
      throw std::logic_error("rule constructor rejected a saturated production at " + to_string(store, c) + ": " +
                             r.error().message);
    if (!(class_of(r.value()->conclusion) == c))
      throw std::logic_error("rule constructor produced a different class for " + to_string(store, c));
    return r.value();
  }

  DerivationPtr min_derivation(ClassId id) const {
    if (min_cache[id]) return min_cache[id];
    if (min_prod[id] < 0) throw std::logic_error("min_derivation: class not derivable");
    const Production& p = classes[id].prods[static_cast<std::size_t>(min_prod[id])];
    std::vector<DerivationPtr> ps;
    for (ClassId q : p.premisses) ps.push_back(min_derivation(q));
    return min_cache[id] = build(id, p, std::move(ps));
  }
};

JudgmentGraph::JudgmentGraph(const TermStore& store, TermId root, const SearchConfig& config)
    : impl_(std::make_unique<Impl>(store, root, config)) {
  if (config.branch_occurrence_cap < 2) throw PreconditionViolation("branch_occurrence_cap must be at least 2");
  root_goal(store, root);
  impl_->run();
  impl_->compute_min();
  impl_->compute_scc();
  auto& st = impl_->stats;
  st.classes = impl_->classes.size();
  for (const auto& c : impl_->classes) {
    st.productions += c.prods.size();
    st.derivable_classes += c.live ? 1 : 0;
  }
  if (config.exhaustive && st.truncated)
    throw ResourceLimit("exhaustive saturation truncated: " + st.truncation_reasons.front());
}

JudgmentGraph::~JudgmentGraph() = default;

const TermStore& JudgmentGraph::store() const { return impl_->store; }
TermId JudgmentGraph::root() const { return impl_->root; }
unsigned JudgmentGraph::order() const { return impl_->m; }
const GraphStats& JudgmentGraph::stats() const { return impl_->stats; }
std::size_t JudgmentGraph::size() const { return impl_->classes.size(); }

std::optional<ClassId> JudgmentGraph::find(const JudgmentClass& c) const {
  auto it = impl_->index.find(c);
  if (it == impl_->index.end()) return std::nullopt;
  return it->second;
}

const JudgmentClass& JudgmentGraph::judgment_class(ClassId id) const { return impl_->classes.at(id).cls; }
bool JudgmentGraph::derivable(ClassId id) const { return impl_->classes.at(id).live; }

std::vector<const Production*> JudgmentGraph::productions(ClassId id) const {
  std::vector<const Production*> out;
  for (const auto& p : impl_->classes.at(id).prods)
    if (impl_->ready(p)) out.push_back(&p);
  return out;
}

std::optional<unsigned> JudgmentGraph::min_counter(ClassId id) const {
  if (impl_->min.at(id) == kInf) return std::nullopt;
  return static_cast<unsigned>(impl_->min[id]);
}

DerivationPtr JudgmentGraph::min_derivation(ClassId id) const { return impl_->min_derivation(id); }

DerivationPtr JudgmentGraph::build(ClassId id, const Production& p, std::vector<DerivationPtr> premisses) const {
  return impl_->build(id, p, std::move(premisses));
}

namespace {

struct Edge {
  ClassId from;
  const Production* prod;
  std::size_t slot;
};

class Analysis {
 public:
  Analysis(const JudgmentGraph& g, const JudgmentGraph::Impl& impl) : g_(g), impl_(impl) {}

  Decision run(ClassId root) {
    Decision d;
    d.complexity = impl_.m;
    d.root_derivable = true;
    reach(root);
    positivity();
    if (auto e = gaining_edge()) {
      d.answer = Decision::Answer::Infinite;
      d.derivation = witness(root, *e);
      d.pump = detect_pump(*d.derivation);
      if (!d.pump) throw std::logic_error("witness derivation has no pump pair");
      return d;
    }
    maximise();
    d.answer = Decision::Answer::Finite;
    d.max_counter_seen = static_cast<unsigned>(max_[root]);
    d.derivation = max_derivation(root);
    return d;
  }

 private:
  void reach(ClassId root) {
    const std::size_t n = impl_.classes.size();
    in_u_.assign(n, false);
    via_.assign(n, std::nullopt);
    std::deque<ClassId> q{root};
    in_u_[root] = true;
    while (!q.empty()) {
      const ClassId c = q.front();
      q.pop_front();
      order_.push_back(c);
      for (const Production* p : g_.productions(c))
        for (std::size_t s = 0; s < p->premisses.size(); ++s) {
          const ClassId d = p->premisses[s];
          if (in_u_[d]) continue;
          in_u_[d] = true;
          via_[d] = Edge{c, p, s};
          q.push_back(d);
        }
    }
  }

  void positivity() {
    const std::size_t n = impl_.classes.size();
    positive_.assign(n, false);
    pos_via_.assign(n, std::nullopt);
    std::vector<std::vector<Edge>> users(n);
    std::deque<ClassId> q;
    for (ClassId c : order_)
      for (const Production* p : g_.productions(c)) {
        for (std::size_t s = 0; s < p->premisses.size(); ++s) users[p->premisses[s]].push_back({c, p, s});
        if (p->weight > 0 && !positive_[c]) {
          positive_[c] = true;
          pos_via_[c] = Edge{c, p, static_cast<std::size_t>(-1)};
          q.push_back(c);
        }
      }
    while (!q.empty()) {
      const ClassId c = q.front();
      q.pop_front();
      for (const Edge& e : users[c]) {
        if (positive_[e.from]) continue;
        positive_[e.from] = true;
        pos_via_[e.from] = e;
        q.push_back(e.from);
      }
    }
  }

  std::optional<Edge> gaining_edge() const {
    for (ClassId c : order_)
      for (const Production* p : g_.productions(c))
        for (std::size_t s = 0; s < p->premisses.size(); ++s) {
          if (impl_.scc[p->premisses[s]] != impl_.scc[c]) continue;
          if (gains(*p, s)) return Edge{c, p, s};
        }
    return std::nullopt;
  }

  bool gains(const Production& p, std::size_t slot) const {
    if (p.weight > 0) return true;
    for (std::size_t t = 0; t < p.premisses.size(); ++t)
      if (t != slot && positive_[p.premisses[t]]) return true;
    return false;
  }

  DerivationPtr positive_derivation(ClassId c) {
    if (auto it = pos_cache_.find(c); it != pos_cache_.end()) return it->second;
    const Edge& e = *pos_via_[c];
    std::vector<DerivationPtr> ps;
    for (std::size_t s = 0; s < e.prod->premisses.size(); ++s)
      ps.push_back(s == e.slot ? positive_derivation(e.prod->premisses[s]) : g_.min_derivation(e.prod->premisses[s]));
    return pos_cache_[c] = g_.build(c, *e.prod, std::move(ps));
  }

  // Node for `e.from` with `sub` in slot e.slot; for the gaining edge one
  // positive sibling closes the other slots when the weight is zero.
  DerivationPtr wrap(const Edge& e, DerivationPtr sub, bool gaining) {
    std::optional<std::size_t> positive_slot;
    if (gaining && e.prod->weight == 0)
      for (std::size_t t = 0; t < e.prod->premisses.size() && !positive_slot; ++t)
        if (t != e.slot && positive_[e.prod->premisses[t]]) positive_slot = t;
    std::vector<DerivationPtr> ps;
    for (std::size_t t = 0; t < e.prod->premisses.size(); ++t) {
      const ClassId q = e.prod->premisses[t];
      if (t == e.slot)
        ps.push_back(sub);
      else if (positive_slot && t == *positive_slot)
        ps.push_back(positive_derivation(q));
      else
        ps.push_back(g_.min_derivation(q));
    }
    return g_.build(e.from, *e.prod, std::move(ps));
  }

  DerivationPtr witness(ClassId root, const Edge& gain) {
    const ClassId a = gain.from;
    const ClassId b = gain.prod->premisses[gain.slot];
    const int comp = impl_.scc[a];
    // path b ->* a inside the component
    std::map<ClassId, Edge> back;
    std::deque<ClassId> q{b};
    std::set<ClassId> seen{b};
    while (!q.empty() && !seen.count(a)) {
      const ClassId c = q.front();
      q.pop_front();
      for (const Production* p : g_.productions(c))
        for (std::size_t s = 0; s < p->premisses.size(); ++s) {
          const ClassId d = p->premisses[s];
          if (impl_.scc[d] != comp || seen.count(d)) continue;
          seen.insert(d);
          back.emplace(d, Edge{c, p, s});
          q.push_back(d);
        }
    }
    std::vector<Edge> cycle{gain};
    if (a != b) {
      std::vector<Edge> tail;
      for (ClassId c = a; c != b; c = back.at(c).from) tail.push_back(back.at(c));
      cycle.insert(cycle.end(), tail.rbegin(), tail.rend());
    }
    DerivationPtr d = g_.min_derivation(a);
    for (auto it = cycle.rbegin(); it != cycle.rend(); ++it) d = wrap(*it, d, it == cycle.rend() - 1);
    for (ClassId c = a; c != root; c = via_[c]->from) d = wrap(*via_[c], d, false);
    return d;
  }

  void maximise() {
    const std::size_t n = impl_.classes.size();
    max_.assign(n, -1);
    stamp_.assign(n, 0);
    max_prod_.assign(n, nullptr);
    std::map<int, std::vector<ClassId>> by_comp;
    for (ClassId c : order_) by_comp[impl_.scc[c]].push_back(c);
    std::uint64_t clock = 0;
    // Tarjan numbers components sinks first.
    for (auto& [comp, members] : by_comp) {
      bool changed = true;
      std::size_t rounds = 0;
      while (changed) {
        changed = false;
        if (++rounds > members.size() + 2) throw std::logic_error("maximise: counters grow without a gaining cycle");
        for (ClassId c : members)
          for (const Production* p : g_.productions(c)) {
            std::int64_t total = p->weight;
            bool known = true;
            for (ClassId q : p->premisses) {
              if (max_[q] < 0) known = false;
              total += max_[q];
            }
            if (!known || total <= max_[c]) continue;
            max_[c] = total;
            max_prod_[c] = p;
            stamp_[c] = ++clock;
            changed = true;
          }
      }
    }
  }

  DerivationPtr max_derivation(ClassId c) {
    if (auto it = max_cache_.find(c); it != max_cache_.end()) return it->second;
    const Production* p = max_prod_[c];
    std::vector<DerivationPtr> ps;
    for (ClassId q : p->premisses) {
      if (stamp_[q] >= stamp_[c]) throw std::logic_error("max_derivation: premiss settled late");
      ps.push_back(max_derivation(q));
    }
    return max_cache_[c] = g_.build(c, *p, std::move(ps));
  }

  const JudgmentGraph& g_;
  const JudgmentGraph::Impl& impl_;
  std::vector<bool> in_u_;
  std::vector<ClassId> order_;
  std::vector<std::optional<Edge>> via_;
  std::vector<bool> positive_;
  std::vector<std::optional<Edge>> pos_via_;
  std::map<ClassId, DerivationPtr> pos_cache_;
  std::vector<std::int64_t> max_;
  std::vector<std::uint64_t> stamp_;
  std::vector<const Production*> max_prod_;
  std::map<ClassId, DerivationPtr> max_cache_;
};

}  // namespace

Decision decide_finiteness(const TermStore& store, TermId root, const SearchConfig& config) {
  const JudgmentClass goal = root_goal(store, root);
  JudgmentGraph g(store, root, config);
  Decision d;
  const auto id = g.find(goal);
  if (!id || !g.derivable(*id)) {
    d.complexity = goal.type.order;
    d.answer = Decision::Answer::Finite;
    d.root_derivable = false;
  } else {
    d = Analysis(g, *g.impl_for_analysis()).run(*id);
  }
  d.stats = g.stats();
  if (d.derivation) d.witness_in_d = in_set_d(*d.derivation, config.branch_occurrence_cap);
  if (d.answer == Decision::Answer::Finite && d.stats.truncated) {
    d.answer = Decision::Answer::Inconclusive;
    d.reason = "search truncated: " + d.stats.truncation_reasons.front();
  }
  return d;
}

Decision decide_finiteness(const Program& program, const SearchConfig& config) {
  auto store = std::make_shared<TermStore>();
  const Elaboration e = elaborate(program, *store);
  Decision d = decide_finiteness(*store, e.root, config);
  d.store = store;
  return d;
}

std::map<JudgmentClass, unsigned> min_counter_table(const TermStore& store, TermId root, const SearchConfig& config) {
  JudgmentGraph g(store, root, config);
  std::map<JudgmentClass, unsigned> out;
  for (ClassId c = 0; c < g.size(); ++c)
    if (auto v = g.min_counter(c)) out.emplace(g.judgment_class(c), *v);
  return out;
}

namespace {

class Searcher {
 public:
  Searcher(const JudgmentGraph& g, const JudgmentGraph::Impl& impl, const SearchConfig& cfg)
      : g_(g), impl_(impl), cfg_(cfg) {}

  std::vector<DerivationPtr> gen(ClassId c) {
    if (stats.truncated) return {};
    unsigned& n = counts_[c];
    if (n >= cfg_.branch_occurrence_cap) return {};
    ++n;
    std::vector<std::pair<ClassId, unsigned>> ctx;
    for (const auto& [k, v] : counts_)
      if (v > 0 && impl_.scc[k] == impl_.scc[c]) ctx.push_back({k, v});
    const auto key = std::make_pair(c, ctx);
    if (auto it = memo_.find(key); it != memo_.end()) {
      --counts_[c];
      return it->second;
    }
    std::vector<DerivationPtr> out;
    std::set<unsigned> counters;
    // Productions that revisit a class on the current branch come first.
    std::vector<const Production*> prods = g_.productions(c);
    std::stable_partition(prods.begin(), prods.end(), [&](const Production* p) {
      for (ClassId q : p->premisses)
        if (auto it = counts_.find(q); it != counts_.end() && it->second > 0) return true;
      return false;
    });
    for (const Production* p : prods) {
      std::vector<std::vector<DerivationPtr>> lists;
      bool empty = false;
      for (ClassId q : p->premisses) {
        lists.push_back(gen(q));
        if (lists.back().empty()) {
          empty = true;
          break;
        }
      }
      if (empty) continue;
      std::vector<std::size_t> at(lists.size(), 0);
      while (!stats.truncated) {
        unsigned counter = p->weight;
        for (std::size_t i = 0; i < lists.size(); ++i) counter += lists[i][at[i]]->conclusion.counter;
        if (cfg_.exhaustive || counters.insert(counter).second) {
          std::vector<DerivationPtr> ps;
          for (std::size_t i = 0; i < lists.size(); ++i) ps.push_back(lists[i][at[i]]);
          out.push_back(g_.build(c, *p, std::move(ps)));
          if (++stats.nodes_built >= cfg_.max_derivation_nodes) stats.truncated = true;
        }
        std::size_t i = 0;
        while (i < lists.size() && ++at[i] == lists[i].size()) at[i++] = 0;
        if (i == lists.size()) break;
      }
    }
    --counts_[c];
    if (!stats.truncated) memo_.emplace(key, out);
    return out;
  }

  SearchStats stats;

 private:
  const JudgmentGraph& g_;
  const JudgmentGraph::Impl& impl_;
  const SearchConfig& cfg_;
  std::map<ClassId, unsigned> counts_;
  std::map<std::pair<ClassId, std::vector<std::pair<ClassId, unsigned>>>, std::vector<DerivationPtr>> memo_;
};

}  // namespace

SearchStats search_derivations(const JudgmentGraph& graph, const JudgmentClass& goal, const SearchConfig& config,
                               const std::function<bool(const DerivationPtr&)>& sink) {
  if (config.branch_occurrence_cap < 2) throw PreconditionViolation("branch_occurrence_cap must be at least 2");
  const auto id = graph.find(goal);
  if (!id || !graph.derivable(*id)) return {};
  Searcher s(graph, *graph.impl_for_analysis(), config);
  const auto all = s.gen(*id);
  for (const auto& d : all) {
    ++s.stats.yielded;
    if (!sink(d)) break;
  }
  return s.stats;
}

}  // namespace hofin
