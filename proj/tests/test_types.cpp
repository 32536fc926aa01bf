#include <set>

#include "comp_props.hpp"
#include "doctest.h"
#include "hofin/types.hpp"

using namespace hofin;

namespace {

const IType o;

FullType ft(unsigned k, OrderSet f, OrderSet m, IType t = {}) { return FullType{k, f, m, std::move(t)}; }

}  // namespace

TEST_CASE("comp reference values") {
  CHECK(comp(2, {0}, {{{0}, 0}, {{}, 0}}) == CompResult{{1}, 0});
  CHECK(comp(2, {0, 1}, {{{0}, 0}, {{}, 0}}) == CompResult{{}, 1});
  CHECK(comp(2, {0, 1}, {{{}, 0}, {{1}, 0}}) == CompResult{{}, 1});
  for (unsigned c1 : {0u, 3u})
    for (unsigned c2 : {0u, 7u}) CHECK(comp(0, {}, {{{}, 1}, {{}, c1}, {{}, c2}}) == CompResult{{}, 1 + c1 + c2});
  for (unsigned m = 0; m <= 4; ++m) CHECK(comp(m, {}, {{{}, 0}}) == CompResult{{}, 0});
}

TEST_CASE("comp places one flag per received flag") {
  // two order-0 flags meet the order-0 marker
  CHECK(comp(1, {0}, {{{0}, 0}, {{0}, 0}}) == CompResult{{}, 2});
  // chain 0 -> 1 -> 2 -> 3
  CHECK(comp(3, {0, 1, 2}, {{{0}, 0}}) == CompResult{{}, 1});
  CHECK(comp(3, {0, 2}, {{{0}, 0}}) == CompResult{{1}, 0});
}

TEST_CASE("comp preconditions") {
  CHECK_THROWS_AS(comp(1, {1}, {}), PreconditionViolation);
  CHECK_THROWS_AS(comp(1, {}, {{{2}, 0}}), PreconditionViolation);
  CHECK_NOTHROW(comp(1, {}, {{{1}, 0}}));
}

TEST_CASE("comp property suites") {
  using namespace hofin::testing;
  for (auto r : {additivity_suite(20000), unflagged_sum_suite(20000), order_raise_suite(20000), order_lower_suite(20000)}) {
    CHECK(r.cases == 20000);
    CHECK(r.violations == 0);
  }
}

TEST_CASE("split") {
  const FullType rho1 = rho(1);
  const FullType tau_f = ft(2, {1}, {}, IType::arrow({rho1}, o));
  const FullType tau_m = ft(2, {}, {1}, IType::arrow({rho1}, o));
  TypeEnv g;
  g.add(0, tau_f);
  g.add(0, tau_m);
  g.add(1, rho1);
  CHECK(split(g, {g}));
  CHECK(split(TypeEnv::single(0, tau_f), {TypeEnv{}}));
  CHECK_FALSE(split(TypeEnv::single(0, tau_m), {TypeEnv{}}));
  // markerless types may be duplicated, marked ones only placed once
  CHECK(split(g, {TypeEnv::single(0, tau_m), TypeEnv::single(1, rho1)}));
  CHECK(split(g, {g, TypeEnv::single(0, tau_f)}));
  CHECK_FALSE(split(g, {TypeEnv::single(0, tau_m)}));
  CHECK_FALSE(split(TypeEnv::single(0, tau_f), {TypeEnv::single(0, tau_m)}));
}

TEST_CASE("markers") {
  CHECK(markers_of(rho(1)) == OrderSet{0});
  CHECK(markers_of(std::vector<FullType>{}).empty());
  TypeEnv g;
  g.add(0, ft(2, {}, {1}, IType::arrow({rho(1)}, o)));
  g.add(1, ft(1, {}, {0}));
  CHECK(markers_of(g) == OrderSet{0, 1});
  CHECK(rho(2) == ft(2, {}, {0, 1}));
  CHECK(rho(0) == ft(0, {}, {}));
}

TEST_CASE("full type enumeration") {
  const Sort g = Sort::ground();
  auto all = all_full_types(g, 1, 100);
  CHECK(all.size() == 3);
  std::set<FullType> expect{ft(1, {}, {}), ft(1, {0}, {}), ft(1, {}, {0})};
  CHECK(std::set<FullType>(all.begin(), all.end()) == expect);
  CHECK(all_full_types(g, 0, 100) == std::vector<FullType>{ft(0, {}, {})});
  CHECK(all_full_types(g, 2, 100).size() == 9);
  CHECK_THROWS_AS(all_full_types(g, 2, 5), ResourceLimit);

  // every member of F^{o->o}_1 is valid and distinct, and the count matches a brute force
  const Sort oo = Sort::arrow(g, g);
  auto arrows = all_full_types(oo, 1, 1000);
  std::set<FullType> seen(arrows.begin(), arrows.end());
  CHECK(seen.size() == arrows.size());
  for (const auto& t : arrows) CHECK(valid_full_type(t, oo));
  // 3 (F,M) pairs at k=1, times 2^3 argument sets
  CHECK(arrows.size() == 3 * 8);

  EnumerationStats st = enumerate_full_types(g, 2, 4, [](const FullType&) { return true; });
  CHECK(st.truncated);
  CHECK(st.yielded == 4);
}

TEST_CASE("full type validity") {
  const Sort g = Sort::ground();
  CHECK(valid_full_type(ft(2, {1}, {0}), g));
  CHECK_FALSE(valid_full_type(ft(2, {1}, {1}), g));
  CHECK_FALSE(valid_full_type(ft(1, {1}, {}), g));
  CHECK_FALSE(valid_full_type(ft(1, {}, {}, IType::arrow({rho(1)}, o)), g));
  const Sort oo_o = Sort::arrow(Sort::arrow(g, g), g);
  // argument full types must have the order of the arrow
  CHECK_FALSE(valid_full_type(ft(2, {}, {}, IType::arrow({ft(1, {}, {}, IType::arrow({rho(1)}, o))}, o)), oo_o));
  CHECK(valid_full_type(ft(2, {}, {0}, IType::arrow({ft(2, {}, {1}, IType::arrow({rho(1)}, o))}, o)), oo_o));
}

TEST_CASE("type printing") {
  const FullType tau_f = ft(2, {1}, {}, IType::arrow({rho(1)}, o));
  CHECK(to_string(tau_f) == "(2,{1},{},{(1,{},{0},o)} -> o)");
}

TEST_CASE("judgment classes") {
  const FullType s = ft(2, {}, {0}, IType::arrow({rho(1)}, o));
  Judgment a{TypeEnv{}, 5, s, 1}, b{TypeEnv{}, 5, s, 2};
  CHECK(class_of(a) == class_of(b));
  Judgment c{TypeEnv::single(0, rho(1)), 5, s, 1};
  CHECK_FALSE(class_of(a) == class_of(c));
  CHECK(class_of(a).hash() == class_of(b).hash());
}

TEST_CASE("environments bind and unbind") {
  TypeEnv g;
  g.add(0, rho(1));
  g.add(2, rho(2));
  const TypeEnv up = g.unbind();
  CHECK(up.entries().size() == 1);
  CHECK(up.has(1, rho(2)));
  const TypeEnv down = up.bind();
  CHECK(down.has(2, rho(2)));
  CHECK(down.at(0).empty());
  CHECK(TypeEnv::single(0, rho(1)).subset_of(g));
  CHECK_FALSE(g.subset_of(TypeEnv::single(0, rho(1))));
}
