#include "hofin/types.hpp"

#include <algorithm>
#include <sstream>

namespace hofin {

std::string OrderSet::to_string() const {
  std::string s = "{";
  bool first = true;
  for (unsigned n = 0; n < 32; ++n) {
    if (!contains(n)) continue;
    if (!first) s += ',';
    s += std::to_string(n);
    first = false;
  }
  return s + "}";
}

struct IType::Node {
  std::vector<FullType> args;
  IType result;
  std::size_t hash = 0;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2)); }

}  // namespace

IType IType::arrow(std::vector<FullType> args, IType result) {
  std::sort(args.begin(), args.end());
  args.erase(std::unique(args.begin(), args.end()), args.end());
  auto n = std::make_shared<Node>();
  std::size_t h = 0x51ed27;
  for (const auto& a : args) h = mix(h, a.hash());
  h = mix(h, result.hash());
  n->args = std::move(args);
  n->result = std::move(result);
  n->hash = h;
  IType t;
  t.node_ = std::move(n);
  return t;
}

const std::vector<FullType>& IType::args() const {
  if (!node_) throw std::logic_error("ground type has no arguments");
  return node_->args;
}

const IType& IType::result() const {
  if (!node_) throw std::logic_error("ground type has no result");
  return node_->result;
}

std::size_t IType::hash() const { return node_ ? node_->hash : 0x1234567; }

bool operator==(const IType& a, const IType& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_ || a.node_->hash != b.node_->hash) return false;
  return a.node_->args == b.node_->args && a.node_->result == b.node_->result;
}

std::strong_ordering operator<=>(const IType& a, const IType& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (!a.node_) return std::strong_ordering::less;
  if (!b.node_) return std::strong_ordering::greater;
  if (auto c = a.node_->args <=> b.node_->args; c != 0) return c;
  return a.node_->result <=> b.node_->result;
}

bool operator==(const FullType& a, const FullType& b) {
  return a.order == b.order && a.flags == b.flags && a.markers == b.markers && a.type == b.type;
}

std::strong_ordering operator<=>(const FullType& a, const FullType& b) {
  if (auto c = a.order <=> b.order; c != 0) return c;
  if (auto c = a.flags <=> b.flags; c != 0) return c;
  if (auto c = a.markers <=> b.markers; c != 0) return c;
  return a.type <=> b.type;
}

std::size_t FullType::hash() const {
  std::size_t h = mix(order, flags.bits());
  h = mix(h, markers.bits() * 31u);
  return mix(h, type.hash());
}

FullType rho(unsigned m) { return FullType{m, {}, OrderSet::below(m), IType()}; }

bool fits(const IType& t, const Sort& s) {
  if (t.is_ground() || s.is_ground()) return t.is_ground() && s.is_ground();
  const unsigned k = s.order();
  for (const auto& a : t.args())
    if (a.order != k || !valid_full_type(a, s.argument())) return false;
  return fits(t.result(), s.result());
}

bool valid_full_type(const FullType& t, const Sort& s) {
  const OrderSet allowed = OrderSet::below(t.order);
  return t.order >= s.order() && t.flags.subset_of(allowed) && t.markers.subset_of(allowed) &&
         t.flags.disjoint(t.markers) && fits(t.type, s);
}

std::string to_string(const IType& t) {
  if (t.is_ground()) return "o";
  std::string s = "{";
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    if (i) s += ", ";
    s += to_string(t.args()[i]);
  }
  s += "} -> ";
  return s + to_string(t.result());
}

std::string to_string(const FullType& t) {
  std::ostringstream out;
  out << '(' << t.order << ',' << t.flags.to_string() << ',' << t.markers.to_string() << ',' << to_string(t.type)
      << ')';
  return out.str();
}

TypeEnv TypeEnv::single(std::uint32_t var, const FullType& t) {
  TypeEnv e;
  e.add(var, t);
  return e;
}

const std::vector<FullType>& TypeEnv::at(std::uint32_t var) const {
  static const std::vector<FullType> none;
  auto it = std::lower_bound(entries_.begin(), entries_.end(), var,
                             [](const Entry& e, std::uint32_t v) { return e.first < v; });
  return it != entries_.end() && it->first == var ? it->second : none;
}

bool TypeEnv::has(std::uint32_t var, const FullType& t) const {
  const auto& ts = at(var);
  return std::binary_search(ts.begin(), ts.end(), t);
}

void TypeEnv::add(std::uint32_t var, const FullType& t) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), var,
                             [](const Entry& e, std::uint32_t v) { return e.first < v; });
  if (it == entries_.end() || it->first != var) it = entries_.insert(it, Entry{var, {}});
  auto pos = std::lower_bound(it->second.begin(), it->second.end(), t);
  if (pos == it->second.end() || !(*pos == t)) it->second.insert(pos, t);
}

void TypeEnv::add_all(const TypeEnv& other) {
  for (const auto& [v, ts] : other.entries_)
    for (const auto& t : ts) add(v, t);
}

TypeEnv TypeEnv::unbind() const {
  TypeEnv out;
  for (const auto& [v, ts] : entries_)
    if (v > 0) out.entries_.emplace_back(v - 1, ts);
  return out;
}

TypeEnv TypeEnv::bind() const {
  TypeEnv out;
  for (const auto& [v, ts] : entries_) out.entries_.emplace_back(v + 1, ts);
  return out;
}

bool TypeEnv::subset_of(const TypeEnv& other) const {
  for (const auto& [v, ts] : entries_) {
    const auto& os = other.at(v);
    if (!std::includes(os.begin(), os.end(), ts.begin(), ts.end())) return false;
  }
  return true;
}

std::size_t TypeEnv::hash() const {
  std::size_t h = 0xabcdef;
  for (const auto& [v, ts] : entries_) {
    h = mix(h, v);
    for (const auto& t : ts) h = mix(h, t.hash());
  }
  return h;
}

std::string to_string(const TypeEnv& env, const std::function<std::string(std::uint32_t)>& name) {
  if (env.empty()) return "ε";
  std::string s = "ε[";
  bool first = true;
  for (const auto& [v, ts] : env.entries()) {
    if (!first) s += ", ";
    first = false;
    s += name(v) + " ↦ {";
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (i) s += ", ";
      s += to_string(ts[i]);
    }
    s += "}";
  }
  return s + "]";
}

std::string to_string(const TypeEnv& env) {
  return to_string(env, [](std::uint32_t v) { return "#" + std::to_string(v); });
}

OrderSet markers_of(const FullType& t) { return t.markers; }

OrderSet markers_of(const std::vector<FullType>& ts) {
  OrderSet m;
  for (const auto& t : ts) m = m | t.markers;
  return m;
}

OrderSet markers_of(const TypeEnv& env) {
  OrderSet m;
  for (const auto& [v, ts] : env.entries()) m = m | markers_of(ts);
  return m;
}

std::size_t JudgmentClass::hash() const { return mix(mix(subject, type.hash()), env.hash()); }

JudgmentClass class_of(const Judgment& j) { return JudgmentClass{j.env, j.subject, j.type}; }

namespace {

// Name of free variable `v` of `subject`, taken from an occurrence.
std::string var_name(const TermStore& store, TermId subject, std::uint32_t v) {
  std::vector<std::pair<TermId, std::uint32_t>> stack{{subject, 0}};
  std::vector<std::pair<TermId, std::uint32_t>> seen;
  while (!stack.empty()) {
    auto [t, depth] = stack.back();
    stack.pop_back();
    if (!store.has_free(t, v + depth)) continue;
    const TermNode& n = store.node(t);
    if (n.kind == TermKind::Var) return n.hint.empty() ? "#" + std::to_string(v) : n.hint;
    const std::uint32_t inner = n.kind == TermKind::Abs ? depth + 1 : depth;
    for (TermId c : store.children(t)) stack.emplace_back(c, inner);
  }
  return "#" + std::to_string(v);
}

}  // namespace

std::string to_string(const TermStore& store, const JudgmentClass& c) {
  auto name = [&](std::uint32_t v) { return var_name(store, c.subject, v); };
  const TermNode& n = store.node(c.subject);
  const std::string subject = n.knot ? n.name : store.to_string(c.subject);
  return to_string(c.env, name) + " ⊢ " + subject + " : " + to_string(c.type);
}

std::string to_string(const TermStore& store, const Judgment& j) {
  return to_string(store, class_of(j)) + " ▷ " + std::to_string(j.counter);
}

CompResult comp(unsigned m, OrderSet markers, const std::vector<CompInput>& inputs) {
  if (m >= 31) throw PreconditionViolation("comp: order too large");
  if (!markers.subset_of(OrderSet::below(m))) throw PreconditionViolation("comp: M not within {0..m-1}");
  for (const auto& in : inputs)
    if (!in.flags.subset_of(OrderSet::below(m + 1))) throw PreconditionViolation("comp: F_i not within {0..m}");
  std::vector<unsigned> f(m + 1, 0), fp(m + 1, 0);
  for (unsigned n = 0; n <= m; ++n) {
    fp[n] = (n >= 1 && markers.contains(n - 1)) ? f[n - 1] : 0;
    unsigned count = 0;
    for (const auto& in : inputs) count += in.flags.contains(n) ? 1u : 0u;
    f[n] = fp[n] + count;
  }
  CompResult r;
  for (unsigned n = 0; n < m; ++n)
    if (f[n] > 0 && !markers.contains(n)) r.flags.insert(n);
  r.counter = fp[m];
  for (const auto& in : inputs) r.counter += in.counter;
  return r;
}

bool split(const TypeEnv& whole, const std::vector<TypeEnv>& parts) {
  for (const auto& p : parts)
    if (!p.subset_of(whole)) return false;
  for (const auto& [v, ts] : whole.entries())
    for (const auto& t : ts) {
      if (t.markers.empty()) continue;
      bool found = false;
      for (const auto& p : parts) found = found || p.has(v, t);
      if (!found) return false;
    }
  return true;
}

namespace {

std::vector<std::pair<OrderSet, OrderSet>> flag_marker_pairs(unsigned k) {
  std::vector<std::pair<OrderSet, OrderSet>> out;
  std::size_t total = 1;
  for (unsigned i = 0; i < k; ++i) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    OrderSet f, mk;
    std::size_t c = code;
    for (unsigned i = 0; i < k; ++i, c /= 3) {
      if (c % 3 == 1) f.insert(i);
      if (c % 3 == 2) mk.insert(i);
    }
    out.emplace_back(f, mk);
  }
  return out;
}

// All of T^sort; false if more than `limit` would be needed.
bool all_itypes(const Sort& s, std::size_t limit, std::vector<IType>& out) {
  if (s.is_ground()) {
    out.push_back(IType());
    return true;
  }
  const unsigned k = s.order();
  std::vector<FullType> elems;
  std::vector<IType> arg_types;
  if (!all_itypes(s.argument(), limit, arg_types)) return false;
  for (const auto& [f, mk] : flag_marker_pairs(k))
    for (const auto& t : arg_types) {
      elems.push_back(FullType{k, f, mk, t});
      if (elems.size() > limit) return false;
    }
  std::vector<IType> results;
  if (!all_itypes(s.result(), limit, results)) return false;
  if (elems.size() >= 63) return false;
  const std::uint64_t subsets = std::uint64_t{1} << elems.size();
  if (subsets > limit || subsets * results.size() > limit) return false;
  for (std::uint64_t mask = 0; mask < subsets; ++mask) {
    std::vector<FullType> chosen;
    for (std::size_t i = 0; i < elems.size(); ++i)
      if ((mask >> i) & 1u) chosen.push_back(elems[i]);
    for (const auto& r : results) out.push_back(IType::arrow(chosen, r));
  }
  return true;
}

}  // namespace

EnumerationStats enumerate_full_types(const Sort& sort, unsigned k, std::size_t limit,
                                      const std::function<bool(const FullType&)>& yield) {
  if (k < sort.order()) throw PreconditionViolation("enumerate_full_types: k below the order of the sort");
  EnumerationStats stats;
  std::vector<IType> types;
  if (!all_itypes(sort, limit, types)) {
    stats.truncated = true;
    return stats;
  }
  for (const auto& [f, mk] : flag_marker_pairs(k))
    for (const auto& t : types) {
      if (stats.yielded >= limit) {
        stats.truncated = true;
        return stats;
      }
      ++stats.yielded;
      if (!yield(FullType{k, f, mk, t})) return stats;
    }
  return stats;
}

std::vector<FullType> all_full_types(const Sort& sort, unsigned k, std::size_t limit) {
  std::vector<FullType> out;
  auto stats = enumerate_full_types(sort, k, limit, [&](const FullType& t) {
    out.push_back(t);
    return true;
  });
  if (stats.truncated)
    throw ResourceLimit("F^" + sort.to_string() + "_" + std::to_string(k) + " has more than " +
                        std::to_string(limit) + " members");
  return out;
}

}  // namespace hofin
