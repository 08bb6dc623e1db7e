#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "weakstore/history.hpp"
#include "weakstore/program.hpp"

namespace weakstore::testkit {

struct HistoryGenOptions {
  std::size_t max_txns = 6;
  std::size_t max_ops = 3;
  std::size_t keys = 2;    // k0, k1, ...
  std::size_t values = 2;  // 1..values; the initial value is 0
  std::size_t sessions = 3;
};

// A well-formed committed history whose external reads pick a uniformly
// random committed writer of the key. It need not satisfy any level.
History random_history(std::mt19937_64& rng, const HistoryGenOptions& opts = {});

struct ProgramGenOptions {
  std::size_t max_sessions = 2;
  std::size_t max_txns = 2;
  std::size_t max_ops = 3;
  std::size_t keys = 2;
  std::size_t values = 2;
};

// Random straight-line program: each instruction is a write, a read or an
// equality-guarded write or read, chosen uniformly.
ProgramIR random_program(std::mt19937_64& rng, const ProgramGenOptions& opts = {});

}  // namespace weakstore::testkit
