#include "hofin/rules.hpp"

#include <algorithm>
#include <set>

namespace hofin {

const char* to_string(RuleErrorKind kind) {
  switch (kind) {
    case RuleErrorKind::ShapeMismatch: return "ShapeMismatch";
    case RuleErrorKind::PreconditionViolation: return "PreconditionViolation";
    case RuleErrorKind::DisjointnessViolation: return "DisjointnessViolation";
    case RuleErrorKind::ArgumentTypeMismatch: return "ArgumentTypeMismatch";
    case RuleErrorKind::DuplicatePremiss: return "DuplicatePremiss";
  }
  return "?";
}

namespace {

RuleError shape(const std::string& m) { return {RuleErrorKind::ShapeMismatch, m}; }
RuleError pre(const std::string& m) { return {RuleErrorKind::PreconditionViolation, m}; }

bool well_typed(const TermStore& store, const Judgment& j) {
  return j.subject < store.size() && valid_full_type(j.type, store.sort_of(j.subject));
}

}  // namespace

FullType restrict_to_operator(const FullType& operand, unsigned k) {
  return FullType{k, operand.flags.restrict_below(k), operand.markers.restrict_below(k), operand.type};
}

Checked<Judgment> rule_br(const TermStore& store, TermId subject, const Judgment& premiss, unsigned which) {
  const TermNode& n = store.node(subject);
  if (n.kind != TermKind::Symbol || n.symbol != kBr) return shape("(BR) needs a br subject");
  if (which != 1 && which != 2) return shape("(BR) branch must be 1 or 2");
  if (n.args[which - 1] != premiss.subject) return shape("(BR) premiss is not about the chosen child");
  if (!well_typed(store, premiss)) return pre("(BR) premiss full type is malformed");
  return Judgment{premiss.env, subject, premiss.type, premiss.counter};
}

Checked<Judgment> rule_var(const TermStore& store, const TypeEnv& env, TermId var, const FullType& stored,
                           unsigned m, OrderSet markers) {
  const TermNode& n = store.node(var);
  if (n.kind != TermKind::Var) return shape("(VAR) needs a variable subject");
  if (!valid_full_type(stored, n.sort)) return pre("(VAR) stored full type is malformed");
  if (!split(env, {TypeEnv::single(n.index, stored)}))
    return pre("(VAR) Split(Γ | ε[x ↦ {stored}]) fails");
  if (!(markers.restrict_below(stored.order) == stored.markers)) return pre("(VAR) M restricted below k differs from M'");
  FullType t{m, stored.flags, markers, stored.type};
  if (!valid_full_type(t, n.sort)) return pre("(VAR) derived full type is malformed");
  return Judgment{env, var, t, 0};
}

Checked<Judgment> rule_lambda(const TermStore& store, TermId subject, const Judgment& premiss, const TypeEnv& env) {
  const TermNode& n = store.node(subject);
  if (n.kind != TermKind::Abs) return shape("(λ) needs an abstraction subject");
  if (n.body != premiss.subject) return shape("(λ) premiss is not about the body");
  if (!well_typed(store, premiss)) return pre("(λ) premiss full type is malformed");
  const std::vector<FullType>& bound = premiss.env.at(0);
  const unsigned k = n.sort.order();
  for (const auto& t : bound)
    if (t.order != k) return pre("(λ) a type of the bound variable has order other than ord(λx.P)");
  if (!split(env, {premiss.env.unbind()})) return pre("(λ) Split(Γ | Γ') fails");
  const FullType& b = premiss.type;
  FullType t{b.order, b.flags, b.markers - markers_of(bound), IType::arrow(bound, b.type)};
  if (!valid_full_type(t, n.sort)) return pre("(λ) derived full type is malformed");
  return Judgment{env, subject, t, premiss.counter};
}

Checked<Judgment> rule_con(const TermStore& store, TermId subject, const std::vector<Judgment>& premisses,
                           OrderSet leaf_markers, unsigned m, const TypeEnv& env) {
  const TermNode& n = store.node(subject);
  if (n.kind != TermKind::Symbol || n.symbol == kBr) return shape("(CON) needs a symbol other than br");
  if (premisses.size() != n.args.size()) return shape("(CON) needs one premiss per argument");
  if (!premisses.empty()) m = premisses[0].type.order;
  OrderSet markers = leaf_markers;
  std::vector<CompInput> inputs;
  inputs.push_back(m == 0 ? CompInput{{}, 1} : CompInput{OrderSet{0}, 0});
  std::vector<TypeEnv> parts;
  for (std::size_t i = 0; i < premisses.size(); ++i) {
    const Judgment& p = premisses[i];
    if (p.subject != n.args[i]) return shape("(CON) premiss " + std::to_string(i + 1) + " is not about argument");
    if (!well_typed(store, p)) return pre("(CON) premiss full type is malformed");
    if (p.type.order != m) return pre("(CON) premisses disagree on the order m");
    if (!p.type.markers.disjoint(markers))
      return RuleError{RuleErrorKind::DisjointnessViolation, "(CON) marker sets overlap"};
    markers = markers | p.type.markers;
    inputs.push_back({p.type.flags, p.counter});
    parts.push_back(p.env);
  }
  if (!premisses.empty() && !leaf_markers.empty()) return pre("(CON) markers at a node with children");
  if (!leaf_markers.subset_of(OrderSet::below(m))) return pre("(CON) leaf markers outside {0..m-1}");
  if (!split(env, parts)) return pre("(CON) Split fails");
  const CompResult r = comp(m, markers, inputs);
  return Judgment{env, subject, FullType{m, r.flags, markers, IType()}, r.counter};
}

Checked<Judgment> rule_app(const TermStore& store, TermId subject, const Judgment& op,
                           const std::vector<Judgment>& operands, const TypeEnv& env) {
  const TermNode& n = store.node(subject);
  if (n.kind != TermKind::App) return shape("(@) needs an application subject");
  if (op.subject != n.fn) return shape("(@) first premiss is not about the operator");
  if (!well_typed(store, op)) return pre("(@) operator full type is malformed");
  if (op.type.type.is_ground()) return shape("(@) operator type is not an arrow");
  const unsigned m = op.type.order;
  const unsigned k = store.sort_of(n.fn).order();
  if (k > m) return pre("(@) ord(P) exceeds m");
  OrderSet markers = op.type.markers;
  std::vector<CompInput> inputs{{op.type.flags, op.counter}};
  std::vector<TypeEnv> parts{op.env};
  std::vector<FullType> built;
  std::set<JudgmentClass> classes;
  for (const auto& q : operands) {
    if (q.subject != n.arg) return shape("(@) operand premiss is not about the operand");
    if (!well_typed(store, q)) return pre("(@) operand full type is malformed");
    if (q.type.order != m) return pre("(@) operand premiss has order other than m");
    if (!classes.insert(class_of(q)).second)
      return RuleError{RuleErrorKind::DuplicatePremiss, "(@) two operand premisses of one class"};
    if (!q.type.markers.disjoint(markers))
      return RuleError{RuleErrorKind::DisjointnessViolation, "(@) marker sets overlap"};
    markers = markers | q.type.markers;
    built.push_back(restrict_to_operator(q.type, k));
    inputs.push_back({q.type.flags.restrict_from(k), q.counter});
    parts.push_back(q.env);
  }
  std::sort(built.begin(), built.end());
  built.erase(std::unique(built.begin(), built.end()), built.end());
  if (built != op.type.type.args())
    return RuleError{RuleErrorKind::ArgumentTypeMismatch, "(@) operand premisses do not build the operator's set"};
  if (!split(env, parts)) return pre("(@) Split fails");
  const CompResult r = comp(m, markers, inputs);
  return Judgment{env, subject, FullType{m, r.flags, markers, op.type.type.result()}, r.counter};
}

}  // namespace hofin
