#include <chrono>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "hofin/derivation.hpp"
#include "hofin/finiteness.hpp"
#include "hofin/oracle.hpp"
#include "hofin/parser.hpp"
#include "hofin/report.hpp"

using namespace hofin;

namespace {

constexpr int kInputError = 2;
constexpr int kOracleMismatch = 4;

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

struct Loaded {
  TermStore store;
  Program program;
  Elaboration elab;
};

// Parses and elaborates; prints diagnostics and returns false on failure.
bool load(const std::string& file, Loaded& out) {
  try {
    out.program = parse_program_file(file);
    out.elab = elaborate(out.program, out.store);
    return true;
  } catch (const ParseError& e) {
    std::cerr << file << ": " << e.what() << "\n";
  } catch (const TermError& e) {
    std::cerr << file << ": " << e.what() << "\n";
  }
  return false;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string sizes_text(const std::vector<std::size_t>& sizes) {
  std::string s = "{";
  for (std::size_t i = 0; i < sizes.size(); ++i) s += (i ? "," : "") + std::to_string(sizes[i]);
  return s + "}";
}

int cmd_check(const std::string& file) {
  Loaded l;
  if (!load(file, l)) return kInputError;
  for (const auto& d : l.program.nonterminals) std::cout << d.name << " : " << d.sort.to_string() << "\n";
  std::cout << "start : " << l.store.sort_of(l.elab.root).to_string() << "\n";
  std::cout << "complexity: " << complexity(l.store, l.elab.root) << "\n";
  return 0;
}

struct DecideOptions {
  SearchConfig config;
  bool json = false;
  std::string emit;
  bool oracle = false;
  Budget budget;
};

int cmd_decide(const std::string& file, const DecideOptions& o) {
  auto t0 = std::chrono::steady_clock::now();
  Loaded l;
  if (!load(file, l)) return kInputError;
  const double parse_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  Decision d;
  try {
    d = decide_finiteness(l.store, l.elab.root, o.config);
  } catch (const ResourceLimit& e) {
    std::cerr << "exhaustive search stopped: " << e.what() << "\n";
    return exit_code(RunReport{"inconclusive"});
  }
  RunReport r = make_report(d);
  r.timings["parse"] = parse_ms;
  r.timings["decide"] = ms_since(t0);

  if (o.oracle) {
    t0 = std::chrono::steady_clock::now();
    r.oracle = summarize(enumerate_language(l.store, l.elab.root, o.budget));
    r.timings["oracle"] = ms_since(t0);
  }

  if (!o.emit.empty() && d.derivation) {
    std::ofstream out(o.emit);
    if (!out) {
      std::cerr << "cannot write " << o.emit << "\n";
      return kInputError;
    }
    out << (ends_with(o.emit, ".json") ? to_json(l.store, *d.derivation) + "\n" : to_dot(l.store, *d.derivation));
  }

  if (o.json) {
    std::cout << to_json(r) << "\n";
  } else {
    std::cout << "answer: " << r.answer << "\n";
    std::cout << "complexity: " << r.complexity << "\n";
    std::cout << "root derivable: " << (r.root_derivable ? "yes" : "no") << "\n";
    if (r.max_counter) std::cout << "max counter: " << *r.max_counter << "\n";
    if (d.pump)
      std::cout << "pump: " << to_string(l.store, d.pump->ancestor_judgment) << " above ▷ "
                << d.pump->descendant_judgment.counter << "\n";
    if (!d.reason.empty()) std::cout << "reason: " << d.reason << "\n";
    if (r.oracle)
      std::cout << "oracle sizes: " << sizes_text(r.oracle->sizes)
                << (r.oracle->complete ? " (complete)" : " (partial)") << "\n";
  }
  if (oracle_mismatch(r)) {
    std::cerr << "oracle mismatch: the complete sample is finite\n";
    return kOracleMismatch;
  }
  return exit_code(r);
}

int cmd_oracle(const std::string& file, const Budget& budget, bool print_trees) {
  Loaded l;
  if (!load(file, l)) return kInputError;
  const LanguageSample s = enumerate_language(l.store, l.elab.root, budget);
  const OracleSummary sum = summarize(s);
  std::cout << "sizes: " << sizes_text(sum.sizes) << "\n";
  std::cout << "trees: " << s.trees.size() << "\n";
  std::cout << "complete: " << (s.complete ? "true" : "false") << "\n";
  if (print_trees)
    for (const auto& t : s.trees) std::cout << to_string(t) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finiteness of languages of higher-order recursion schemes"};
  app.require_subcommand(1);

  std::string file;
  auto* check = app.add_subcommand("check", "Parse, sort-check and print sorts and complexity");
  check->add_option("file", file, "Program file")->required();

  DecideOptions opts;
  auto* decide = app.add_subcommand("decide", "Decide whether the language is finite");
  decide->add_option("file", file, "Program file")->required();
  decide->add_flag("--exhaustive", opts.config.exhaustive, "Enumerate full operand type universes");
  decide->add_option("--branch-cap", opts.config.branch_occurrence_cap, "Judgments of one class per branch")
      ->check(CLI::Range(2u, 1000u));
  decide->add_option("--max-derivation-nodes", opts.config.max_derivation_nodes, "Search node budget");
  decide->add_flag("--json", opts.json, "Print the report as JSON");
  decide->add_option("--emit-derivation", opts.emit, "Write the witness derivation (DOT, or JSON for .json)");
  decide->add_flag("--oracle", opts.oracle, "Cross-check with the tree enumeration oracle");
  decide->add_option("--max-size", opts.budget.max_tree_size, "Oracle tree size bound")->check(CLI::PositiveNumber);
  decide->add_option("--max-steps", opts.budget.max_beta_steps, "Oracle beta steps per path")
      ->check(CLI::PositiveNumber);

  Budget budget;
  bool print_trees = false;
  auto* oracle = app.add_subcommand("oracle", "Enumerate small trees of the language");
  oracle->add_option("file", file, "Program file")->required();
  oracle->add_option("--max-size", budget.max_tree_size, "Tree size bound")->check(CLI::PositiveNumber);
  oracle->add_option("--max-steps", budget.max_beta_steps, "Beta steps per path")->check(CLI::PositiveNumber);
  oracle->add_flag("--print-trees", print_trees, "Print every tree");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  if (*check) return cmd_check(file);
  if (*decide) return cmd_decide(file, opts);
  return cmd_oracle(file, budget, print_trees);
}
