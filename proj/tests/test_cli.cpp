#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hofin/report.hpp"
#include "support.hpp"

using namespace hofin;
using hofin::testing::program_path;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(HOFIN_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string prog(const std::string& name) { return program_path(name); }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("hofin_test_" + name);
}

}  // namespace

TEST_CASE("check") {
  Run r = run("check " + prog("p1.hrs"));
  CHECK(r.code == 0);
  CHECK(r.out.find("complexity: 2") != std::string::npos);
  CHECK(r.out.find("R : (o -> o) -> o") != std::string::npos);
  CHECK(run("check " + prog("sort_clash.hrs")).code == 2);
  const auto empty = temp_file("empty.hrs");
  std::ofstream(empty).close();
  CHECK(run("check " + empty.string()).code == 2);
  CHECK(run("check /nonexistent/file.hrs").code == 2);
}

TEST_CASE("decide exit codes") {
  CHECK(run("decide " + prog("p1.hrs")).code == 1);
  CHECK(run("decide " + prog("p3.hrs")).code == 0);
  CHECK(run("decide " + prog("z_chain.hrs")).code == 1);
  CHECK(run("decide " + prog("n_diverging.hrs")).code == 0);
  CHECK(run("decide " + prog("sort_clash.hrs")).code == 2);
  CHECK(run("decide --branch-cap 1 " + prog("p1.hrs")).code == 2);
  CHECK(run("bogus").code == 2);
  CHECK(run("decide --exhaustive " + prog("p3.hrs")).code == 3);
  CHECK(run("decide --exhaustive " + prog("z_chain.hrs")).code == 1);
}

TEST_CASE("decide json") {
  Run r = run("decide --json " + prog("p3.hrs"));
  REQUIRE(r.code == 0);
  RunReport rep = report_from_json(r.out);
  CHECK(rep.answer == "finite");
  CHECK(rep.complexity == 2);
  CHECK(rep.root_derivable);
  REQUIRE(rep.max_counter);
  CHECK(*rep.max_counter == 1);
  CHECK_FALSE(rep.pump);
  CHECK(rep.timings.count("decide"));

  Run p = run("decide --json --oracle --max-size 10 " + prog("p1.hrs"));
  REQUIRE(p.code == 1);
  RunReport inf = report_from_json(p.out);
  REQUIRE(inf.pump);
  CHECK(inf.pump->fulltype.rfind("(2,{},{0},", 0) == 0);
  CHECK(inf.pump->ancestor_counter > inf.pump->descendant_counter);
  REQUIRE(inf.oracle);
  CHECK(inf.oracle->sizes == std::vector<std::size_t>{2, 3, 5, 9});
  CHECK_FALSE(inf.oracle->complete);
}

TEST_CASE("json output is deterministic apart from timings") {
  for (const char* f : {"p1.hrs", "p2.hrs", "p4.hrs"}) {
    Run a = run(std::string("decide --json ") + prog(f));
    Run b = run(std::string("decide --json ") + prog(f));
    CHECK(to_json(report_from_json(a.out), false) == to_json(report_from_json(b.out), false));
  }
}

TEST_CASE("report round trip") {
  RunReport r{"infinite", 2, true, std::nullopt, PumpSummary{"(2,{},{0},o)", 3, 2}, OracleSummary{{2, 3}, false},
              {{"decide", 1.5}}};
  CHECK(report_from_json(to_json(r)) == r);
  RunReport f{"finite", 0, false, 0u, std::nullopt, std::nullopt, {}};
  CHECK(report_from_json(to_json(f)) == f);
  CHECK_THROWS_AS(report_from_json("{}"), std::invalid_argument);
  CHECK_THROWS_AS(report_from_json(R"({"answer":"maybe","complexity":0,"root_derivable":true})"),
                  std::invalid_argument);
  CHECK(exit_code(r) == 1);
  CHECK(exit_code(f) == 0);
  CHECK(exit_code(RunReport{"inconclusive"}) == 3);
  RunReport bad = r;
  bad.oracle->complete = true;
  CHECK(oracle_mismatch(bad));
  CHECK_FALSE(oracle_mismatch(r));
}

TEST_CASE("emit derivation") {
  const auto dot = temp_file("p1.dot");
  CHECK(run("decide --emit-derivation " + dot.string() + " " + prog("p1.hrs")).code == 1);
  std::stringstream d;
  d << std::ifstream(dot).rdbuf();
  CHECK(d.str().rfind("digraph derivation {", 0) == 0);
  CHECK(d.str().find("▷") != std::string::npos);

  const auto js = temp_file("p3.json");
  CHECK(run("decide --emit-derivation " + js.string() + " " + prog("p3.hrs")).code == 0);
  std::stringstream j;
  j << std::ifstream(js).rdbuf();
  CHECK(j.str().find("\"rule\"") != std::string::npos);
  CHECK(j.str().find("\"counter\": 1") != std::string::npos);
}

TEST_CASE("oracle command") {
  Run r = run("oracle --max-size 10 " + prog("p1.hrs"));
  CHECK(r.code == 0);
  CHECK(r.out.find("sizes: {2,3,5,9}") != std::string::npos);
  Run p3 = run("oracle --max-size 10 " + prog("p3.hrs"));
  CHECK(p3.out.find("sizes: {1}") != std::string::npos);
  Run e = run("oracle --print-trees " + prog("e_only.hrs"));
  CHECK(e.out.find("sizes: {1}") != std::string::npos);
  CHECK(e.out.find("complete: true") != std::string::npos);
  CHECK(e.out.find("\ne\n") != std::string::npos);
  CHECK(run("oracle --max-size 0 " + prog("p1.hrs")).code == 2);
}
