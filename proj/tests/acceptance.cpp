#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "comp_props.hpp"
#include "hofin/finiteness.hpp"
#include "support.hpp"

using namespace hofin;
using hofin::testing::load_file;
using hofin::testing::Loaded;
using Answer = Decision::Answer;

namespace {

// Judgments from every derivation produced by criteria 1 and 2.
std::vector<std::pair<std::shared_ptr<Loaded>, Judgment>> seen_judgments;
std::map<std::string, std::pair<std::shared_ptr<Loaded>, Decision>> verdicts;

void record(const std::shared_ptr<Loaded>& l, const Derivation& d) {
  for (const auto& j : all_judgments(d)) seen_judgments.emplace_back(l, j);
}

std::shared_ptr<Loaded> load_shared(const std::string& file) { return std::make_shared<Loaded>(load_file(file)); }

std::vector<DerivationPtr> search(const Loaded& l, std::size_t limit) {
  SearchConfig cfg;
  JudgmentGraph g(*l.store, l.root(), cfg);
  std::vector<DerivationPtr> out;
  search_derivations(g, root_goal(*l.store, l.root()), cfg, [&](const DerivationPtr& d) {
    out.push_back(d);
    return out.size() < limit;
  });
  return out;
}

std::string sizes_text(const std::set<std::size_t>& s) {
  std::ostringstream out;
  out << "{";
  for (auto it = s.begin(); it != s.end(); ++it) out << (it == s.begin() ? "" : ",") << *it;
  out << "}";
  return out.str();
}

bool golden_decisions(std::ostream& why) {
  const std::vector<std::pair<std::string, Answer>> golden{
      {"p1.hrs", Answer::Infinite},        {"p2.hrs", Answer::Infinite},         {"p3.hrs", Answer::Finite},
      {"p4.hrs", Answer::Finite},          {"e_only.hrs", Answer::Finite},       {"z_chain.hrs", Answer::Infinite},
      {"n_growing.hrs", Answer::Infinite}, {"n_diverging.hrs", Answer::Finite},
  };
  bool ok = true;
  for (const auto& [file, expected] : golden) {
    auto l = load_shared(file);
    Decision d = decide_finiteness(*l->store, l->root());
    why << file << "=" << to_string(d.answer) << " ";
    if (d.answer != expected) ok = false;
    if (d.derivation) record(l, *d.derivation);
    for (const auto& y : search(*l, 50)) record(l, *y);
    verdicts[file] = {l, d};
  }
  for (const char* file : {"z_chain.hrs", "n_growing.hrs"}) {
    auto l = load_file(file);
    const auto sizes = enumerate_language(*l.store, l.root(), {1000, 6}).sizes();
    why << file << " oracle " << sizes_text(sizes) << " ";
    if (sizes.size() < 5) ok = false;
  }
  return ok;
}

bool p1_reproduction(std::ostream& why) {
  auto shared = load_shared("p1.hrs");
  const Loaded& l = *shared;
  const FullType tau_f{2, {1}, {}, IType::arrow({rho(1)}, IType())};
  const FullType tau_m{2, {}, {1}, IType::arrow({rho(1)}, IType())};
  const FullType sigma_r{2, {}, {0}, IType::arrow({tau_f, tau_m}, IType())};
  const JudgmentClass r_class{TypeEnv(), l.store->node(l.root()).fn, sigma_r};
  std::set<unsigned> counters;
  bool pumped = false;
  for (const auto& d : search(l, 100)) {
    record(shared, *d);
    counters.insert(d->conclusion.counter);
    auto p = detect_pump(*d);
    if (p && class_of(p->ancestor_judgment) == r_class && p->ancestor_judgment.counter == 2 &&
        p->descendant_judgment.counter == 1)
      pumped = true;
  }
  const bool all = counters.count(2) && counters.count(3) && counters.count(4);
  why << "counters " << sizes_text({counters.begin(), counters.end()}) << ", σ_R pump 2/1 " << (pumped ? "found" : "missing");
  return all && pumped;
}

bool comp_reference(std::ostream& why) {
  bool ok = comp(2, {0}, {{{0}, 0}, {{}, 0}}) == CompResult{{1}, 0};
  ok &= comp(2, {0, 1}, {{{0}, 0}, {{}, 0}}) == CompResult{{}, 1};
  ok &= comp(2, {0, 1}, {{{}, 0}, {{1}, 0}}) == CompResult{{}, 1};
  for (unsigned c1 = 0; c1 < 5; ++c1)
    for (unsigned c2 = 0; c2 < 5; ++c2) ok &= comp(0, {}, {{{}, 1}, {{}, c1}, {{}, c2}}) == CompResult{{}, 1 + c1 + c2};
  why << "4 reference values";
  return ok;
}

bool comp_properties(std::ostream& why) {
  using namespace hofin::testing;
  const std::size_t n = 20000;
  const std::vector<std::pair<const char*, SuiteResult>> suites{{"additivity", additivity_suite(n)},
                                                                {"unflagged sum", unflagged_sum_suite(n)},
                                                                {"order raise", order_raise_suite(n)},
                                                                {"order lower", order_lower_suite(n)}};
  bool ok = true;
  for (const auto& [name, r] : suites) {
    why << name << " " << r.violations << "/" << r.cases << " ";
    ok &= r.cases >= 10000 && r.violations == 0;
  }
  return ok;
}

bool judgment_invariants(std::ostream& why) {
  std::size_t bad6 = 0, bad24 = 0;
  for (const auto& [l, j] : seen_judgments) {
    if (!quiet_counter_holds(*l->store, j)) ++bad6;
    if (!marker_scope_holds(j)) ++bad24;
  }
  why << seen_judgments.size() << " judgments, quiet-counter violations " << bad6 << ", marker-scope violations " << bad24;
  return !seen_judgments.empty() && bad6 == 0 && bad24 == 0;
}

bool pump_splice(std::ostream& why) {
  bool ok = true;
  std::size_t checked = 0;
  for (const auto& [file, v] : verdicts) {
    const Decision& d = v.second;
    if (d.answer != Answer::Infinite) continue;
    ++checked;
    if (!d.pump || !d.derivation) {
      ok = false;
      continue;
    }
    const TermStore& s = *v.first->store;
    auto spliced = splice(s, d.derivation, *d.pump);
    const unsigned diff = d.pump->ancestor_judgment.counter - d.pump->descendant_judgment.counter;
    const bool good = spliced.ok() && !recheck(s, *spliced.value()) &&
                      spliced.value()->conclusion.counter == d.derivation->conclusion.counter + diff;
    why << file << (good ? " +" + std::to_string(diff) : " failed") << " ";
    ok &= good;
  }
  return ok && checked == 4;
}

bool order0_witness(std::ostream& why) {
  auto l = load_file("z_chain.hrs");
  const LanguageSample sample = enumerate_language(*l.store, l.root(), {1000, 8});
  std::map<unsigned, DerivationPtr> by_counter;
  for (const auto& d : search(l, 10)) by_counter.emplace(d->conclusion.counter, d);
  bool ok = true;
  for (unsigned c : {1u, 2u, 3u}) {
    if (!by_counter.count(c)) {
      why << "no derivation with counter " << c << " ";
      ok = false;
      continue;
    }
    const RankedTree t = extract_tree_order0(*l.store, *by_counter[c]);
    const bool good = tree_size(t) == c && sample.trees.count(t);
    why << c << "->" << to_string(t) << (good ? "" : "(bad)") << " ";
    ok &= good;
  }
  return ok;
}

bool oracle_fidelity(std::ostream& why) {
  auto p1 = load_file("p1.hrs");
  auto p3 = load_file("p3.hrs");
  const auto s1 = enumerate_language(*p1.store, p1.root(), {1000, 10}).sizes();
  const auto s3 = enumerate_language(*p3.store, p3.root(), {1000, 10}).sizes();
  why << "p1 " << sizes_text(s1) << ", p3 " << sizes_text(s3);
  return s1 == std::set<std::size_t>{2, 3, 5, 9} && s3 == std::set<std::size_t>{1};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<bool(std::ostream&)>>> criteria{
      {"golden decisions", golden_decisions},   {"P1 derivation reproduction", p1_reproduction},
      {"comp reference values", comp_reference},         {"comp property suites", comp_properties},
      {"judgment invariants", judgment_invariants}, {"pump splice", pump_splice},
      {"order-0 witness", order0_witness},      {"oracle fidelity", oracle_fidelity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream why;
    bool ok = false;
    try {
      ok = criteria[i].second(why);
    } catch (const std::exception& e) {
      why << "exception: " << e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (ok ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": " << why.str() << " ("
              << s << " s)\n";
    failed += ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
