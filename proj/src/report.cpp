#include "hofin/report.hpp"

#include <stdexcept>

#include "json.hpp"

namespace hofin {

using nlohmann::json;

RunReport make_report(const Decision& d) {
  RunReport r;
  r.answer = to_string(d.answer);
  r.complexity = d.complexity;
  r.root_derivable = d.root_derivable;
  if (d.answer == Decision::Answer::Finite) r.max_counter = d.max_counter_seen;
  if (d.answer == Decision::Answer::Infinite && d.pump)
    r.pump = PumpSummary{to_string(d.pump->ancestor_judgment.type), d.pump->ancestor_judgment.counter,
                         d.pump->descendant_judgment.counter};
  return r;
}

OracleSummary summarize(const LanguageSample& s) {
  const auto sizes = s.sizes();
  return OracleSummary{{sizes.begin(), sizes.end()}, s.complete};
}

bool oracle_mismatch(const RunReport& r) { return r.oracle && r.oracle->complete && r.answer == "infinite"; }

std::string to_json(const RunReport& r, bool with_timings) {
  json j;
  j["answer"] = r.answer;
  j["complexity"] = r.complexity;
  j["root_derivable"] = r.root_derivable;
  if (r.max_counter) j["max_counter"] = *r.max_counter;
  if (r.pump)
    j["pump"] = {{"fulltype", r.pump->fulltype},
                 {"ancestor_counter", r.pump->ancestor_counter},
                 {"descendant_counter", r.pump->descendant_counter}};
  if (r.oracle) j["oracle"] = {{"sizes", r.oracle->sizes}, {"complete", r.oracle->complete}};
  if (with_timings) j["timings"] = r.timings;
  return j.dump(2);
}

RunReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    RunReport r;
    r.answer = j.at("answer").get<std::string>();
    if (r.answer != "finite" && r.answer != "infinite" && r.answer != "inconclusive")
      throw std::invalid_argument("unknown answer " + r.answer);
    r.complexity = j.at("complexity").get<unsigned>();
    r.root_derivable = j.at("root_derivable").get<bool>();
    if (j.contains("max_counter")) r.max_counter = j["max_counter"].get<unsigned>();
    if (j.contains("pump")) {
      const json& p = j["pump"];
      r.pump = PumpSummary{p.at("fulltype").get<std::string>(), p.at("ancestor_counter").get<unsigned>(),
                           p.at("descendant_counter").get<unsigned>()};
    }
    if (j.contains("oracle"))
      r.oracle = OracleSummary{j["oracle"].at("sizes").get<std::vector<std::size_t>>(),
                               j["oracle"].at("complete").get<bool>()};
    if (j.contains("timings")) r.timings = j["timings"].get<std::map<std::string, double>>();
    return r;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed report: ") + e.what());
  }
}

int exit_code(const RunReport& r) {
  if (r.answer == "finite") return 0;
  if (r.answer == "infinite") return 1;
  return 3;
}

}  // namespace hofin
