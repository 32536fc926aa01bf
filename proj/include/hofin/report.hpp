#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hofin/finiteness.hpp"
#include "hofin/oracle.hpp"

namespace hofin {

struct PumpSummary {
  std::string fulltype;
  unsigned ancestor_counter = 0;
  unsigned descendant_counter = 0;
  friend bool operator==(const PumpSummary&, const PumpSummary&) = default;
};

struct OracleSummary {
  std::vector<std::size_t> sizes;
  bool complete = false;
  friend bool operator==(const OracleSummary&, const OracleSummary&) = default;
};

struct RunReport {
  std::string answer;  // finite | infinite | inconclusive
  unsigned complexity = 0;
  bool root_derivable = false;
  std::optional<unsigned> max_counter;  // finite
  std::optional<PumpSummary> pump;      // infinite
  std::optional<OracleSummary> oracle;
  std::map<std::string, double> timings;  // milliseconds per phase

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

RunReport make_report(const Decision& d);
OracleSummary summarize(const LanguageSample& s);

// A complete oracle sample is all of L, so L is finite.
bool oracle_mismatch(const RunReport& r);

std::string to_json(const RunReport& r, bool with_timings = true);
// Throws std::invalid_argument on malformed input.
RunReport report_from_json(const std::string& text);

// 0 finite, 1 infinite, 3 inconclusive
int exit_code(const RunReport& r);

}  // namespace hofin
