#pragma once

#include <cstddef>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "weakstore/program.hpp"
#include "weakstore/store.hpp"

namespace weakstore::testkit {

struct IterationOutcome {
  std::uint64_t seed = 0;
  std::vector<std::string> failed;  // assertion names
};

struct RunReport {
  std::string program;
  std::string level;
  std::size_t iterations = 0;
  std::map<std::string, std::size_t> failures;  // per assertion
  std::optional<std::size_t> first_failure;     // 1-based iteration
  std::size_t distinct_states = 0;
  // Histories that failed the post-hoc isolation check.
  std::size_t unsound_histories = 0;
  std::vector<IterationOutcome> outcomes;
};

struct RunOptions {
  std::size_t iterations = 1;
  bool check_histories = false;
  bool keep_outcomes = false;
};

// Runs the program with seeds base.seed, base.seed + 1, ...
RunReport run_iterations(const ProgramIR& p, const StoreConfig& base, const RunOptions& opts);

// 1-based iteration at which `assertion` first fails, scanning at most
// `max_iterations` runs with seeds base.seed, base.seed + 1, ...
std::optional<std::size_t> first_failure(const ProgramIR& p, const StoreConfig& base, const std::string& assertion,
                                          std::size_t max_iterations);

nlohmann::json report_to_json(const RunReport& r);

}  // namespace weakstore::testkit
