#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "weakstore/program.hpp"

namespace weakstore::testkit {

enum class Benchmark { kCart, kStack, kTwitter, kCourseware };

// Assertion names.
inline constexpr const char* kNoReappearingItem = "no-reappearing-item";
inline constexpr const char* kUniquePops = "unique-pops";
inline constexpr const char* kFeedContainsTimeline = "feed-contains-timeline";
inline constexpr const char* kWithinCapacity = "enrollment-within-capacity";
inline constexpr const char* kNoRemovedEnrollment = "no-enrollment-in-removed-course";

// One client operation. Arguments by benchmark:
//   cart:        add | del | get                      (item fixed to "I")
//   stack:       push | pop                           (pushed values are unique)
//   twitter:     tweet(a) | follow(a, b) | timeline(a) | feed(a)
//   courseware:  enroll | delete | show               (students are unique)
struct BenchOp {
  BenchOp(std::string k, std::string x = {}, std::string y = {}) : kind(std::move(k)), a(std::move(x)), b(std::move(y)) {}

  std::string kind;
  std::string a;
  std::string b;
};

// Operations per client thread; each thread is one session.
using Harness = std::vector<std::vector<BenchOp>>;

std::string benchmark_name(Benchmark b);
std::optional<Benchmark> benchmark_by_name(const std::string& name);
std::vector<Benchmark> all_benchmarks();

// Three threads of three operations each.
Harness default_harness(Benchmark b);
Harness random_harness(Benchmark b, std::size_t threads, std::size_t ops, std::mt19937_64& rng);

// Program plus assertions. Stack operations split into one transaction per
// read, write and compare-and-swap, retrying a failed swap once.
ProgramIR build_benchmark(Benchmark b, const Harness& h);

// Capacity of the course in the courseware benchmark.
inline constexpr std::int64_t kCourseCapacity = 1;

}  // namespace weakstore::testkit
