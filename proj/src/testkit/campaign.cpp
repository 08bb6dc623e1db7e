#include "weakstore/testkit/campaign.hpp"

#include <algorithm>
#include <set>

#include "weakstore/history_json.hpp"
#include "weakstore/interpreter.hpp"
#include "weakstore/isolation.hpp"

namespace weakstore::testkit {

RunReport run_iterations(const ProgramIR& p, const StoreConfig& base, const RunOptions& opts) {
  RunReport r;
  r.program = p.name;
  r.level = base.level.display_name();
  r.iterations = opts.iterations;
  for (const auto& a : p.assertions) r.failures[a.name] = 0;
  std::set<std::vector<Value>> states;
  for (std::size_t i = 0; i < opts.iterations; ++i) {
    StoreConfig cfg = base;
    cfg.seed = base.seed + i;
    RunResult run = run_program(p, cfg);
    states.insert(observable(run.history));
    if (opts.check_histories && !satisfies(run.history, base.level).satisfied) ++r.unsound_histories;
    IterationOutcome outcome{cfg.seed, failed_assertions(p, run.locals)};
    for (const auto& name : outcome.failed) ++r.failures[name];
    if (!outcome.failed.empty() && !r.first_failure) r.first_failure = i + 1;
    if (opts.keep_outcomes) r.outcomes.push_back(std::move(outcome));
  }
  r.distinct_states = states.size();
  return r;
}

std::optional<std::size_t> first_failure(const ProgramIR& p, const StoreConfig& base, const std::string& assertion,
                                          std::size_t max_iterations) {
  for (std::size_t i = 0; i < max_iterations; ++i) {
    StoreConfig cfg = base;
    cfg.seed = base.seed + i;
    RunResult run = run_program(p, cfg);
    auto failed = failed_assertions(p, run.locals);
    if (std::find(failed.begin(), failed.end(), assertion) != failed.end()) return i + 1;
  }
  return std::nullopt;
}

nlohmann::json report_to_json(const RunReport& r) {
  nlohmann::json j = {{"program", r.program},
                      {"isolation", r.level},
                      {"iterations", r.iterations},
                      {"failures", r.failures},
                      {"first_failure", r.first_failure ? nlohmann::json(*r.first_failure) : nlohmann::json()},
                      {"distinct_states", r.distinct_states}};
  j["unsound_histories"] = r.unsound_histories;
  if (!r.outcomes.empty()) {
    nlohmann::json outcomes = nlohmann::json::array();
    for (const auto& o : r.outcomes) outcomes.push_back({{"seed", o.seed}, {"failed", o.failed}});
    j["outcomes"] = std::move(outcomes);
  }
  return j;
}

}  // namespace weakstore::testkit
