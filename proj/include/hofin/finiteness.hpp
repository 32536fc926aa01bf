#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hofin/derivation.hpp"
#include "hofin/parser.hpp"

namespace hofin {

struct SearchConfig {
  unsigned branch_occurrence_cap = 3;
  unsigned max_operand_premisses = 8;
  std::size_t fulltype_enumeration_limit = 4096;
  std::size_t max_derivation_nodes = 2'000'000;
  std::size_t max_judgment_classes = 200'000;
  bool exhaustive = false;
};

JudgmentClass root_goal(const TermStore& store, TermId root);

using ClassId = std::uint32_t;

// One way of deriving a class from premiss classes. The conclusion's counter
// is weight plus the premiss counters.
struct Production {
  Rule rule = Rule::VAR;
  std::vector<ClassId> premisses;  // APP: operator first
  unsigned weight = 0;
  unsigned branch = 0;
  OrderSet leaf_markers;  // CON: M', VAR: conclusion markers
  FullType stored;        // VAR
  bool copied = false;    // added by environment weakening
};

struct GraphStats {
  std::size_t classes = 0;
  std::size_t derivable_classes = 0;
  std::size_t productions = 0;
  bool truncated = false;
  std::vector<std::string> truncation_reasons;
};

// All judgment classes of order m = complexity(root) over the subterm
// universe that the saturation reaches, with their productions.
class JudgmentGraph {
 public:
  JudgmentGraph(const TermStore& store, TermId root, const SearchConfig& config);
  ~JudgmentGraph();
  JudgmentGraph(const JudgmentGraph&) = delete;
  JudgmentGraph& operator=(const JudgmentGraph&) = delete;

  const TermStore& store() const;
  TermId root() const;
  unsigned order() const;
  const GraphStats& stats() const;

  std::optional<ClassId> find(const JudgmentClass& c) const;
  const JudgmentClass& judgment_class(ClassId id) const;
  bool derivable(ClassId id) const;
  // Productions whose premisses are all derivable.
  std::vector<const Production*> productions(ClassId id) const;
  std::size_t size() const;

  std::optional<unsigned> min_counter(ClassId id) const;
  DerivationPtr min_derivation(ClassId id) const;
  // Builds one node from a production and already built premisses.
  DerivationPtr build(ClassId id, const Production& p, std::vector<DerivationPtr> premisses) const;

  struct Impl;
  const Impl* impl_for_analysis() const { return impl_.get(); }

 private:
  std::unique_ptr<Impl> impl_;
};

struct Decision {
  enum class Answer { Finite, Infinite, Inconclusive } answer = Answer::Inconclusive;
  unsigned complexity = 0;
  bool root_derivable = false;
  unsigned max_counter_seen = 0;  // Finite: the largest root counter
  std::optional<PumpPair> pump;   // Infinite
  // Infinite: a derivation with a pump pair; Finite: one with the largest
  // root counter.
  DerivationPtr derivation;
  bool witness_in_d = false;
  std::string reason;  // Inconclusive
  GraphStats stats;
  std::shared_ptr<const TermStore> store;  // set by the Program overload
};

const char* to_string(Decision::Answer a);

// Infinite iff some class reachable from the root goal lies on a cycle of
// productions that adds to the counter. Non-exhaustive runs that hit a limit
// report Inconclusive instead of Finite; exhaustive runs throw ResourceLimit.
Decision decide_finiteness(const TermStore& store, TermId root, const SearchConfig& config = {});
Decision decide_finiteness(const Program& program, const SearchConfig& config = {});

struct SearchStats {
  std::size_t yielded = 0;
  std::size_t nodes_built = 0;
  bool truncated = false;
};

// Derivations of `goal` in D, built through the rule constructors. Without
// exhaustive mode every subderivation is one representative per counter
// value. The sink returns false to stop.
SearchStats search_derivations(const JudgmentGraph& graph, const JudgmentClass& goal, const SearchConfig& config,
                               const std::function<bool(const DerivationPtr&)>& sink);

std::map<JudgmentClass, unsigned> min_counter_table(const TermStore& store, TermId root,
                                                    const SearchConfig& config = {});

}  // namespace hofin
