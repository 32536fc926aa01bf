#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "hofin/types.hpp"

namespace hofin::testing {

struct SuiteResult {
  std::size_t cases = 0;
  std::size_t violations = 0;
};

class CompGen {
 public:
  explicit CompGen(unsigned seed) : rng_(seed) {}

  unsigned pick(unsigned lo, unsigned hi) { return std::uniform_int_distribution<unsigned>(lo, hi)(rng_); }
  // Uniform subset of {0..k-1}.
  OrderSet subset(unsigned k) { return OrderSet(pick(0, (1u << k) - 1)); }

  std::vector<CompInput> inputs(unsigned k, unsigned max_counter) {
    std::vector<CompInput> in(pick(0, 4));
    for (auto& i : in) i = {subset(k), pick(0, max_counter)};
    return in;
  }

 private:
  std::mt19937 rng_;
};

inline unsigned count_in(OrderSet s, unsigned n) { return s.contains(n) ? 1 : 0; }

// comp(m, M, [(F_i, c_i + k_i)]) = (F, c + Σk_i)
inline SuiteResult additivity_suite(std::size_t n, unsigned seed = 1) {
  CompGen g(seed);
  SuiteResult r;
  for (; r.cases < n; ++r.cases) {
    const unsigned m = g.pick(0, 5);
    const OrderSet M = g.subset(m);
    auto in = g.inputs(m + 1, 5);
    const CompResult base = comp(m, M, in);
    unsigned extra = 0;
    for (auto& i : in) {
      const unsigned k = g.pick(0, 5);
      i.counter += k;
      extra += k;
    }
    const CompResult shifted = comp(m, M, in);
    if (!(shifted == CompResult{base.flags, base.counter + extra})) ++r.violations;
  }
  return r;
}

// F ∩ M = ∅, F, M ⊆ {0..m-1}: comp(m, M, [(F,e)] + [(∅,d_i)]) = (F, e + Σd_i)
inline SuiteResult unflagged_sum_suite(std::size_t n, unsigned seed = 2) {
  CompGen g(seed);
  SuiteResult r;
  for (; r.cases < n; ++r.cases) {
    const unsigned m = g.pick(0, 5);
    const OrderSet M = g.subset(m);
    const OrderSet F = g.subset(m) - M;
    const unsigned e = g.pick(0, 5);
    std::vector<CompInput> in{{F, e}};
    unsigned sum = e;
    for (unsigned i = g.pick(0, 4); i > 0; --i) {
      in.push_back({{}, g.pick(0, 5)});
      sum += in.back().counter;
    }
    if (!(comp(m, M, in) == CompResult{F, sum})) ++r.violations;
  }
  return r;
}

// M, F_i ⊆ {0..m-1}, comp_m = (F, c) ⇒ comp_{m+1}(M; (G_i, 0)) = (G, 0)
inline SuiteResult order_raise_suite(std::size_t n, unsigned seed = 3) {
  CompGen g(seed);
  SuiteResult r;
  for (; r.cases < n; ++r.cases) {
    const unsigned m = g.pick(0, 5);
    const OrderSet M = g.subset(m);
    const auto in = g.inputs(m, 3);
    const CompResult base = comp(m, M, in);
    std::vector<CompInput> lifted;
    for (const auto& i : in) lifted.push_back({i.counter > 0 ? i.flags | OrderSet{m} : i.flags, 0});
    const OrderSet G = base.counter > 0 ? base.flags | OrderSet{m} : base.flags;
    if (!(comp(m + 1, M, lifted) == CompResult{G, 0})) ++r.violations;
  }
  return r;
}

// m ≥ 1, c'_i ≥ c_i + |F_i ∩ {m-1}| ⇒
// comp_{m-1}(M↾<m-1; (F_i↾<m-1, c'_i)) = (F↾<m-1, c') with c' ≥ c + |F ∩ {m-1}|
inline SuiteResult order_lower_suite(std::size_t n, unsigned seed = 4) {
  CompGen g(seed);
  SuiteResult r;
  for (; r.cases < n; ++r.cases) {
    const unsigned m = g.pick(1, 5);
    const OrderSet M = g.subset(m);
    const auto in = g.inputs(m, 3);
    const CompResult base = comp(m, M, in);
    std::vector<CompInput> lowered;
    for (const auto& i : in)
      lowered.push_back({i.flags.restrict_below(m - 1), i.counter + count_in(i.flags, m - 1) + g.pick(0, 2)});
    const CompResult low = comp(m - 1, M.restrict_below(m - 1), lowered);
    if (!(low.flags == base.flags.restrict_below(m - 1)) ||
        low.counter < base.counter + count_in(base.flags, m - 1))
      ++r.violations;
  }
  return r;
}

}  // namespace hofin::testing
