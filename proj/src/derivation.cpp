#include "hofin/derivation.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace hofin {

const char* to_string(Rule r) {
  switch (r) {
    case Rule::BR: return "BR";
    case Rule::VAR: return "VAR";
    case Rule::LAMBDA: return "λ";
    case Rule::CON: return "CON";
    case Rule::APP: return "@";
  }
  return "?";
}

Checked<DerivationPtr> make_node(const TermStore& store, Rule rule, TermId subject, const TypeEnv& env,
                                 std::vector<DerivationPtr> premisses, unsigned branch, OrderSet leaf_markers,
                                 const FullType& stored, unsigned m) {
  auto arity_error = [] { return RuleError{RuleErrorKind::ShapeMismatch, "wrong number of premisses"}; };
  std::optional<Checked<Judgment>> j;
  switch (rule) {
    case Rule::BR:
      if (premisses.size() != 1) return arity_error();
      j = rule_br(store, subject, premisses[0]->conclusion, branch);
      if (j->ok() && !(j->value().env == env))
        return RuleError{RuleErrorKind::PreconditionViolation, "(BR) environment differs from premiss"};
      break;
    case Rule::VAR:
      if (!premisses.empty()) return arity_error();
      j = rule_var(store, env, subject, stored, m, leaf_markers);
      break;
    case Rule::LAMBDA:
      if (premisses.size() != 1) return arity_error();
      j = rule_lambda(store, subject, premisses[0]->conclusion, env);
      break;
    case Rule::CON: {
      std::vector<Judgment> ps;
      for (const auto& p : premisses) ps.push_back(p->conclusion);
      j = rule_con(store, subject, ps, leaf_markers, m, env);
      break;
    }
    case Rule::APP: {
      if (premisses.empty()) return arity_error();
      std::vector<Judgment> ops;
      for (std::size_t i = 1; i < premisses.size(); ++i) ops.push_back(premisses[i]->conclusion);
      j = rule_app(store, subject, premisses[0]->conclusion, ops, env);
      break;
    }
  }
  if (!j->ok()) return j->error();
  auto d = std::make_shared<Derivation>();
  d->rule = rule;
  d->conclusion = j->value();
  d->premisses = std::move(premisses);
  d->branch = branch;
  d->leaf_markers = rule == Rule::VAR || rule == Rule::CON ? leaf_markers : OrderSet{};
  d->stored = stored;
  return DerivationPtr(std::move(d));
}

Checked<DerivationPtr> replay(const TermStore& store, const Derivation& d) {
  std::vector<DerivationPtr> ps;
  for (const auto& p : d.premisses) {
    auto r = replay(store, *p);
    if (!r.ok()) return r.error();
    ps.push_back(r.value());
  }
  // VAR keeps the full marker set of its conclusion as side data.
  const OrderSet markers = d.rule == Rule::VAR ? d.conclusion.type.markers : d.leaf_markers;
  return make_node(store, d.rule, d.conclusion.subject, d.conclusion.env, std::move(ps), d.branch, markers, d.stored,
                   d.conclusion.type.order);
}

std::optional<RuleError> recheck(const TermStore& store, const Derivation& d) {
  for (const auto& p : d.premisses)
    if (auto e = recheck(store, *p)) return e;
  std::vector<DerivationPtr> ps(d.premisses.begin(), d.premisses.end());
  const OrderSet markers = d.rule == Rule::VAR ? d.conclusion.type.markers : d.leaf_markers;
  auto r = make_node(store, d.rule, d.conclusion.subject, d.conclusion.env, std::move(ps), d.branch, markers,
                     d.stored, d.conclusion.type.order);
  if (!r.ok()) return r.error();
  if (!(r.value()->conclusion == d.conclusion))
    return RuleError{RuleErrorKind::PreconditionViolation,
                     "recorded conclusion differs from the recomputed one: " + to_string(store, d.conclusion) +
                         " vs " + to_string(store, r.value()->conclusion)};
  return std::nullopt;
}

std::size_t node_count(const Derivation& d) {
  std::size_t n = 1;
  for (const auto& p : d.premisses) n += node_count(*p);
  return n;
}

std::vector<Judgment> all_judgments(const Derivation& d) {
  std::vector<Judgment> out;
  std::vector<const Derivation*> stack{&d};
  while (!stack.empty()) {
    const Derivation* n = stack.back();
    stack.pop_back();
    out.push_back(n->conclusion);
    for (const auto& p : n->premisses) stack.push_back(p.get());
  }
  return out;
}

namespace {

void branch_max(const Derivation& d, std::map<JudgmentClass, unsigned>& counts, unsigned& best) {
  const JudgmentClass c = class_of(d.conclusion);
  const unsigned n = ++counts[c];
  best = std::max(best, n);
  for (const auto& p : d.premisses) branch_max(*p, counts, best);
  if (--counts[c] == 0) counts.erase(c);
}

bool app_premisses_distinct(const Derivation& d) {
  if (d.rule == Rule::APP) {
    std::set<JudgmentClass> seen;
    for (std::size_t i = 1; i < d.premisses.size(); ++i)
      if (!seen.insert(class_of(d.premisses[i]->conclusion)).second) return false;
  }
  for (const auto& p : d.premisses)
    if (!app_premisses_distinct(*p)) return false;
  return true;
}

}  // namespace

unsigned max_branch_occurrences(const Derivation& d) {
  std::map<JudgmentClass, unsigned> counts;
  unsigned best = 0;
  branch_max(d, counts, best);
  return best;
}

bool in_set_d(const Derivation& d, unsigned cap) { return max_branch_occurrences(d) <= cap && app_premisses_distinct(d); }

const Derivation& at_path(const Derivation& d, const Path& p) {
  const Derivation* cur = &d;
  for (std::size_t i : p) cur = cur->premisses.at(i).get();
  return *cur;
}

std::optional<PumpPair> detect_pump(const Derivation& d) {
  std::vector<const Derivation*> ancestors;
  Path path;
  std::optional<PumpPair> found;
  std::function<void(const Derivation&)> visit = [&](const Derivation& n) {
    if (found) return;
    const JudgmentClass c = class_of(n.conclusion);
    for (std::size_t i = 0; i < ancestors.size(); ++i) {
      const Judgment& a = ancestors[i]->conclusion;
      if (a.counter != n.conclusion.counter && class_of(a) == c) {
        found = PumpPair{Path(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(i)), path, a, n.conclusion};
        return;
      }
    }
    ancestors.push_back(&n);
    for (std::size_t i = 0; i < n.premisses.size() && !found; ++i) {
      path.push_back(i);
      visit(*n.premisses[i]);
      path.pop_back();
    }
    ancestors.pop_back();
  };
  visit(d);
  return found;
}

namespace {

DerivationPtr replace_at(const DerivationPtr& d, const Path& p, std::size_t depth, const DerivationPtr& with) {
  if (depth == p.size()) return with;
  auto copy = std::make_shared<Derivation>(*d);
  copy->premisses[p[depth]] = replace_at(d->premisses[p[depth]], p, depth + 1, with);
  return copy;
}

DerivationPtr subtree(const DerivationPtr& d, const Path& p) {
  DerivationPtr cur = d;
  for (std::size_t i : p) cur = cur->premisses.at(i);
  return cur;
}

}  // namespace

Checked<DerivationPtr> splice(const TermStore& store, const DerivationPtr& d, const PumpPair& pump) {
  if (pump.descendant.size() <= pump.ancestor.size() ||
      !std::equal(pump.ancestor.begin(), pump.ancestor.end(), pump.descendant.begin()))
    return RuleError{RuleErrorKind::ShapeMismatch, "splice: descendant is not below ancestor"};
  DerivationPtr upper = subtree(d, pump.ancestor);
  DerivationPtr spliced = replace_at(d, pump.descendant, 0, upper);
  return replay(store, *spliced);
}

RankedTree extract_tree_order0(const TermStore& store, const Derivation& d) {
  const Judgment& j = d.conclusion;
  if (j.type.order != 0) throw PreconditionViolation("extract_tree_order0: derivation order is not 0");
  if (!j.env.empty()) throw PreconditionViolation("extract_tree_order0: nonempty environment");
  switch (d.rule) {
    case Rule::BR: return extract_tree_order0(store, *d.premisses.at(0));
    case Rule::CON: {
      RankedTree t{store.symbol(store.node(j.subject).symbol).name, {}};
      for (const auto& p : d.premisses) t.children.push_back(extract_tree_order0(store, *p));
      return t;
    }
    default: throw PreconditionViolation("extract_tree_order0: rule other than CON or BR at order 0");
  }
}

bool quiet_counter_holds(const TermStore& store, const Judgment& j) {
  const unsigned m = j.type.order;
  if (m == 0) return true;
  if (j.type.markers.contains(m - 1)) return true;
  if (store.sort_of(j.subject).order() > m - 1) return true;
  return j.counter == 0;
}

bool marker_scope_holds(const Judgment& j) {
  if (!markers_of(j.env).subset_of(j.type.markers)) return false;
  OrderSet seen;
  for (const auto& [v, ts] : j.env.entries()) {
    const OrderSet mk = markers_of(ts);
    if (!mk.disjoint(seen)) return false;
    seen = seen | mk;
  }
  return true;
}

namespace {

std::string escape_dot(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const TermStore& store, const Derivation& d) {
  std::ostringstream out;
  out << "digraph derivation {\n  node [shape=box, fontname=\"monospace\"];\n";
  std::size_t next = 0;
  std::function<std::size_t(const Derivation&)> emit = [&](const Derivation& n) {
    const std::size_t id = next++;
    out << "  n" << id << " [label=\"" << escape_dot(to_string(store, n.conclusion)) << "\", tooltip=\""
        << to_string(n.rule) << "\"];\n";
    for (const auto& p : n.premisses) {
      const std::size_t c = emit(*p);
      out << "  n" << id << " -> n" << c << " [label=\"" << to_string(n.rule) << "\"];\n";
    }
    return id;
  };
  emit(d);
  out << "}\n";
  return out.str();
}

std::string to_json(const TermStore& store, const Derivation& d) {
  std::function<nlohmann::json(const Derivation&)> conv = [&](const Derivation& n) {
    const JudgmentClass c = class_of(n.conclusion);
    std::string full = to_string(store, c);
    const auto turnstile = full.find(" ⊢ ");
    nlohmann::json j;
    j["rule"] = to_string(n.rule);
    j["conclusion"] = {{"env", full.substr(0, turnstile)},
                       {"subject", store.to_string(n.conclusion.subject)},
                       {"subject_id", n.conclusion.subject},
                       {"fulltype", to_string(n.conclusion.type)},
                       {"counter", n.conclusion.counter}};
    j["premisses"] = nlohmann::json::array();
    for (const auto& p : n.premisses) j["premisses"].push_back(conv(*p));
    return j;
  };
  return conv(d).dump(2);
}

}  // namespace hofin
