#include <set>

#include "doctest.h"
#include "hofin/parser.hpp"
#include "support.hpp"

using namespace hofin;
using hofin::testing::load_file;
using hofin::testing::load_text;

TEST_CASE("sort orders") {
  const Sort o = Sort::ground();
  const Sort oo = Sort::arrow(o, o);
  CHECK(ord_sort(o) == 0);
  CHECK(ord_sort(oo) == 1);
  CHECK(ord_sort(Sort::arrow(oo, o)) == 2);
  CHECK(ord_sort(Sort::arrow(o, Sort::arrow(oo, o))) == 2);
  CHECK(parse_sort("(o -> o) -> o") == Sort::arrow(oo, o));
  CHECK(parse_sort("o -> o -> o") == Sort::arrow(o, oo));
  CHECK(parse_sort("o -> o -> o").arity() == 2);
}

TEST_CASE("parse p3") {
  Program p = parse_program_file(hofin::testing::program_path("p3.hrs"));
  REQUIRE(p.nonterminals.size() == 1);
  CHECK(p.nonterminals[0].name == "R");
  CHECK(p.nonterminals[0].sort == parse_sort("(o -> o) -> o"));
  auto l = load_file("p3.hrs");
  CHECK(l.store->to_string(l.root()) == "R (\\x. x)");
}

TEST_CASE("start e is a single constant") {
  auto l = load_text("symbol e : 0\nstart e");
  const TermNode& n = l.store->node(l.root());
  CHECK(n.kind == TermKind::Symbol);
  CHECK(n.args.empty());
  CHECK(l.store->symbol(n.symbol).name == "e");
}

TEST_CASE("parse errors carry their kind") {
  auto kind_of = [](const std::string& text) {
    try {
      parse_program(text);
    } catch (const ParseError& e) {
      return e.kind();
    }
    FAIL("no error");
    return ParseErrorKind::SyntaxError;
  };
  CHECK(kind_of("start f") == ParseErrorKind::UnknownName);
  CHECK(kind_of("") == ParseErrorKind::SyntaxError);
  CHECK(kind_of("symbol a : 1\nstart a") == ParseErrorKind::RankMismatch);
  CHECK(kind_of("symbol e : 0\nstart e e") == ParseErrorKind::RankMismatch);
  CHECK(kind_of("symbol e : 0\nstart br e") == ParseErrorKind::RankMismatch);
  CHECK(kind_of("symbol e : 0\nF : o -> o = \\x:o. x\nstart F F") == ParseErrorKind::SortMismatch);
  CHECK(kind_of("symbol e : 0\nF : o = \\x:o. x\nstart F") == ParseErrorKind::SortMismatch);
  CHECK(kind_of("A : o = B\nB : o = A\nstart A") == ParseErrorKind::CyclicDefinition);
  CHECK(kind_of("symbol e : 0\nstart \\x. x") == ParseErrorKind::SyntaxError);
  CHECK_THROWS_AS(parse_program_file(hofin::testing::program_path("sort_clash.hrs")), ParseError);
}

TEST_CASE("name resolution prefers binders, then nonterminals, then symbols") {
  auto l = load_text("symbol e : 0\nsymbol a : 1\ne2 : o = a e\nstart (\\e:o. e) e2");
  // the binder shadows the symbol inside the abstraction
  const TermNode& app = l.store->node(l.root());
  REQUIRE(app.kind == TermKind::App);
  CHECK(l.store->node(l.store->node(app.fn).body).kind == TermKind::Var);
  CHECK(l.store->node(app.arg).knot);
}

TEST_CASE("trailing abstraction argument") {
  auto l = load_text("symbol a : 1\nsymbol e : 0\nR : (o -> o) -> o = \\f:o -> o. f e\nstart R \\x:o. a x");
  CHECK(l.store->to_string(l.root()) == "R (\\x. a x)");
}

TEST_CASE("complexity") {
  CHECK(complexity(*load_file("p1.hrs").store, load_file("p1.hrs").root()) == 2);
  auto e = load_file("e_only.hrs");
  CHECK(complexity(*e.store, e.root()) == 0);
  auto z = load_file("z_chain.hrs");
  CHECK(complexity(*z.store, z.root()) == 0);
  auto n = load_file("n_growing.hrs");
  CHECK(complexity(*n.store, n.root()) == 1);
}

TEST_CASE("subterm universe of Z") {
  auto z = load_file("z_chain.hrs");
  auto u = subterm_universe(*z.store, z.root());
  CHECK(u.size() == 3);
  CHECK(u[0] == z.nonterminal("Z"));
  std::set<std::string> printed;
  for (TermId id : u) printed.insert(z.store->to_string(id));
  CHECK(printed == std::set<std::string>{"br e (a Z)", "e", "a Z"});
}

TEST_CASE("subterm universe properties") {
  for (const char* f : {"p1.hrs", "p2.hrs", "p3.hrs", "p4.hrs", "n_growing.hrs"}) {
    auto l = load_file(f);
    const TermStore& s = *l.store;
    auto u = subterm_universe(s, l.root());
    std::set<TermId> members(u.begin(), u.end());
    CHECK(members.size() == u.size());
    unsigned m = complexity(s, l.root());
    bool attained = false;
    for (TermId id : u) {
      for (TermId c : s.children(id)) CHECK(members.count(c) == 1);
      CHECK(s.sort_of(id).order() <= m);
      attained = attained || s.sort_of(id).order() == m;
      const TermNode& n = s.node(id);
      if (n.kind == TermKind::App) CHECK(s.sort_of(n.fn) == Sort::arrow(s.sort_of(n.arg), n.sort));
      if (n.kind == TermKind::Abs) CHECK(n.sort == Sort::arrow(n.binder, s.sort_of(n.body)));
      if (n.kind == TermKind::Symbol) {
        CHECK(n.sort.is_ground());
        CHECK(n.args.size() == s.symbol(n.symbol).rank);
      }
    }
    CHECK(attained);
    CHECK(subterm_universe(s, l.root()) == u);
  }
}

TEST_CASE("p1 universe contains both abstraction bodies") {
  auto l = load_file("p1.hrs");
  std::set<std::string> printed;
  for (TermId id : subterm_universe(*l.store, l.root())) printed.insert(l.store->to_string(id));
  for (const char* s : {"R (\\x. a x)", "\\x. a x", "a x", "x", "br (f e) (R (\\x. f (f x)))", "f e", "e",
                        "R (\\x. f (f x))", "\\x. f (f x)", "f (f x)", "f x", "f"})
    CHECK_MESSAGE(printed.count(s) == 1, std::string(s));
}

TEST_CASE("p1 and p3 share the R definition") {
  auto p1 = load_file("p1.hrs");
  auto p3 = load_file("p3.hrs");
  CHECK(bisimilar(*p1.store, p1.nonterminal("R"), *p3.store, p3.nonterminal("R")));
  CHECK_FALSE(bisimilar(*p1.store, p1.root(), *p3.store, p3.root()));
  // in one store the second elaboration gets its own knot
  TermStore shared;
  auto a = elaborate(parse_program_file(hofin::testing::program_path("p1.hrs")), shared);
  auto b = elaborate(parse_program_file(hofin::testing::program_path("p3.hrs")), shared);
  CHECK(bisimilar(shared, a.nonterminals[0].second, shared, b.nonterminals[0].second));
}

TEST_CASE("elaboration is idempotent") {
  for (const char* f : {"p1.hrs", "p2.hrs", "z_chain.hrs", "n_growing.hrs"}) {
    auto x = load_file(f);
    auto y = load_file(f);
    auto ux = subterm_universe(*x.store, x.root());
    auto uy = subterm_universe(*y.store, y.root());
    CHECK(ux.size() == uy.size());
    CHECK(bisimilar(*x.store, x.root(), *y.store, y.root()));
  }
}

TEST_CASE("program without nonterminals elaborates to its start term") {
  auto l = load_text("symbol a : 1\nsymbol e : 0\nstart (\\x:o. a x) e");
  TermStore s;
  s.declare_symbol("a", 1);
  const SymbolId e = s.declare_symbol("e", 0);
  const SymbolId a = *s.find_symbol("a");
  const TermId x = s.make_var(0, Sort::ground());
  const TermId t = s.make_app(s.make_abs(Sort::ground(), s.make_symbol(a, {x})), s.make_symbol(e, {}));
  CHECK(bisimilar(*l.store, l.root(), s, t));
}

TEST_CASE("aliases") {
  auto l = load_text("symbol e : 0\nA : o = B\nB : o = br e A\nstart A");
  CHECK(l.store->to_string(l.root()) == "br e A");
}
