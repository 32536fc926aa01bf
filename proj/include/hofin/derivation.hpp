#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hofin/oracle.hpp"
#include "hofin/rules.hpp"

namespace hofin {

enum class Rule { BR, VAR, LAMBDA, CON, APP };

const char* to_string(Rule r);

struct Derivation;
using DerivationPtr = std::shared_ptr<const Derivation>;

// Premisses are ordered: BR has one, LAMBDA one, CON one per argument, APP
// has the operator premiss first and then the operand premisses.
struct Derivation {
  Rule rule = Rule::VAR;
  Judgment conclusion;
  std::vector<DerivationPtr> premisses;
  unsigned branch = 0;        // BR: 1 or 2
  OrderSet leaf_markers;      // CON
  FullType stored;            // VAR
};

// Applies the rule constructor named by `rule` to the given premisses and
// data, with `env` as the conclusion's environment.
Checked<DerivationPtr> make_node(const TermStore& store, Rule rule, TermId subject, const TypeEnv& env,
                                 std::vector<DerivationPtr> premisses, unsigned branch = 0,
                                 OrderSet leaf_markers = {}, const FullType& stored = {}, unsigned m = 0);

// Re-runs every rule constructor bottom-up and compares with the recorded
// conclusions, counters included.
std::optional<RuleError> recheck(const TermStore& store, const Derivation& d);

// Rebuilds conclusions (counters in particular) from the leaves up.
Checked<DerivationPtr> replay(const TermStore& store, const Derivation& d);

std::size_t node_count(const Derivation& d);
std::vector<Judgment> all_judgments(const Derivation& d);

// Set D: at most `cap` judgments of one class on every root-leaf path, and
// pairwise distinct classes among the operand premisses of every (@).
bool in_set_d(const Derivation& d, unsigned cap);
unsigned max_branch_occurrences(const Derivation& d);

using Path = std::vector<std::size_t>;  // premiss indices from the root

struct PumpPair {
  Path ancestor, descendant;
  Judgment ancestor_judgment, descendant_judgment;
};

// First pair in preorder of the descendant, ancestors scanned from the root.
std::optional<PumpPair> detect_pump(const Derivation& d);

const Derivation& at_path(const Derivation& d, const Path& p);

// Replaces the descendant's subtree by a copy of the ancestor's subtree and
// recomputes counters on the way up.
Checked<DerivationPtr> splice(const TermStore& store, const DerivationPtr& d, const PumpPair& pump);

// For a derivation of  ε ⊢ P : (0,∅,∅,o) ▷ c: the tree it describes, of size c.
RankedTree extract_tree_order0(const TermStore& store, const Derivation& d);

// If m-1 ∉ M and ord(P) ≤ m-1 then c = 0.
bool quiet_counter_holds(const TermStore& store, const Judgment& j);
// Mk(Γ) ⊆ Mk(τ̂), and no marker is provided by two variables.
bool marker_scope_holds(const Judgment& j);

std::string to_dot(const TermStore& store, const Derivation& d);
std::string to_json(const TermStore& store, const Derivation& d);

}  // namespace hofin
