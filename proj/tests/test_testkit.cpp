#include <gtest/gtest.h>

#include <random>

#include "weakstore/errors.hpp"
#include "weakstore/interpreter.hpp"
#include "weakstore/isolation.hpp"
#include "weakstore/testkit/campaign.hpp"
#include "weakstore/testkit/enumerate.hpp"
#include "weakstore/testkit/generators.hpp"
#include "weakstore/testkit/microbench.hpp"

namespace weakstore::testkit {
namespace {

std::vector<IsolationLevel> levels() { return {read_committed(), causal(), serializability()}; }

// write(k1, 1); read(k2)  ||  write(k2, 1); read(k1)
ProgramIR store_buffering() {
  ProgramIR p;
  p.default_value = Value(0);
  p.sessions = {{{Instruction::write(Expr::lit(Value("k1")), Expr::lit(Value(1))),
                  Instruction::read("x", Expr::lit(Value("k2")))}},
                {{Instruction::write(Expr::lit(Value("k2")), Expr::lit(Value(1))),
                  Instruction::read("y", Expr::lit(Value("k1")))}}};
  return p;
}

TEST(Enumerate, StoreBufferingStates) {
  ProgramIR p = store_buffering();
  const ObservableState both_zero{Value(0), Value(0)};
  auto cc = serial_enumerate(p, causal());
  auto ser = serial_enumerate(p, serializability());
  EXPECT_TRUE(observable_states(cc).count(both_zero));
  EXPECT_FALSE(observable_states(ser).count(both_zero));
  EXPECT_EQ(observable_states(ser).size(), 2u);
  // Both reads returning 1 needs a wr cycle, which no level admits.
  EXPECT_EQ(observable_states(cc).size(), 3u);
  for (const auto& level : levels()) EXPECT_EQ(serial_enumerate(p, level), baseline_enumerate(p, level));
}

TEST(Enumerate, SingleTransactionHasOneHistory) {
  ProgramIR p;
  p.default_value = Value(0);
  p.sessions = {{{Instruction::write(Expr::lit(Value("k")), Expr::lit(Value(1))),
                  Instruction::read("x", Expr::lit(Value("k"))), Instruction::read("y", Expr::lit(Value("j")))}}};
  for (const auto& level : levels()) {
    EXPECT_EQ(serial_enumerate(p, level).size(), 1u);
    EXPECT_EQ(baseline_enumerate(p, level).size(), 1u);
  }
}

TEST(Enumerate, EveryEnumeratedHistorySatisfiesTheLevel) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 15; ++i) {
    ProgramIR p = random_program(rng);
    for (const auto& level : levels()) {
      auto all = serial_enumerate(p, level);
      for (const auto& [_, h] : all.members()) EXPECT_TRUE(satisfies(h, level).satisfied);
    }
  }
}

TEST(Enumerate, SerialMatchesBaselineOnRandomPrograms) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 20; ++i) {
    ProgramIR p = random_program(rng);
    for (const auto& level : levels()) {
      auto serial = serial_enumerate(p, level);
      auto baseline = baseline_enumerate(p, level);
      EXPECT_EQ(serial, baseline) << level.display_name() << " program " << i;
    }
  }
}

TEST(Enumerate, WeakerLevelsAdmitMoreHistories) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 15; ++i) {
    ProgramIR p = random_program(rng);
    auto rc = serial_enumerate(p, read_committed());
    auto cc = serial_enumerate(p, causal());
    auto ser = serial_enumerate(p, serializability());
    for (const auto& [form, _] : ser.members()) EXPECT_TRUE(cc.members().count(form));
    for (const auto& [form, _] : cc.members()) EXPECT_TRUE(rc.members().count(form));
  }
}

TEST(Enumerate, RandomRunsStayInsideTheEnumeratedSet) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 10; ++i) {
    ProgramIR p = random_program(rng);
    for (const auto& level : levels()) {
      auto all = serial_enumerate(p, level);
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        StoreConfig cfg;
        cfg.level = level;
        cfg.seed = seed;
        EXPECT_TRUE(all.contains(run_program(p, cfg).history));
      }
    }
  }
}

TEST(Enumerate, NodeCap) {
  ProgramIR p = build_benchmark(Benchmark::kCart, default_harness(Benchmark::kCart));
  EnumerateOptions opts;
  opts.node_cap = 10;
  try {
    serial_enumerate(p, causal(), opts);
    FAIL() << "expected a budget error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExceeded);
  }
  EXPECT_THROW(baseline_enumerate(p, causal(), opts), Error);
}

TEST(Enumerate, CanonicalFormIgnoresIds) {
  History a(Value(0));
  TxnId a1 = a.begin_txn(SessionId{0});
  TxnId a2 = a.begin_txn(SessionId{1});
  a.append_write(a1, "k", Value(1));
  a.commit(a1);
  a.append_read(a2, "k", Value(1), a1);
  a.commit(a2);

  History b(Value(0));
  TxnId b2 = b.begin_txn(SessionId{1});
  TxnId b1 = b.begin_txn(SessionId{0});
  b.append_write(b1, "k", Value(1));
  b.commit(b1);
  b.append_read(b2, "k", Value(1), b1);
  b.commit(b2);
  EXPECT_EQ(canonical_form(a), canonical_form(b));

  History c(Value(0));
  TxnId c2 = c.begin_txn(SessionId{1});
  c.append_read(c2, "k", Value(0), c.init_txn());
  c.commit(c2);
  EXPECT_NE(canonical_form(a), canonical_form(c));
}

TEST(Coverage, CountsDistinctStates) {
  EXPECT_EQ(coverage({{Value(1)}, {Value(1)}, {Value(2)}}), 2u);
  EXPECT_EQ(coverage({}), 0u);
}

TEST(Microbench, NamesRoundTrip) {
  for (auto b : all_benchmarks()) EXPECT_EQ(benchmark_by_name(benchmark_name(b)), b);
  EXPECT_FALSE(benchmark_by_name("bank"));
}

TEST(Microbench, UnknownOperationIsRejected) {
  EXPECT_THROW(build_benchmark(Benchmark::kCart, {{BenchOp("checkout")}}), Error);
}

TEST(Microbench, SingleThreadNeverFails) {
  std::mt19937_64 rng(2);
  for (auto b : all_benchmarks()) {
    for (int i = 0; i < 10; ++i) {
      ProgramIR p = build_benchmark(b, random_harness(b, 1, 4, rng));
      StoreConfig cfg;
      cfg.level = causal();
      RunOptions opts;
      opts.iterations = 30;
      auto r = run_iterations(p, cfg, opts);
      EXPECT_FALSE(r.first_failure) << benchmark_name(b);
    }
  }
}

TEST(Microbench, SerializableRunsNeverFail) {
  for (auto b : all_benchmarks()) {
    ProgramIR p = build_benchmark(b, default_harness(b));
    StoreConfig cfg;
    cfg.level = serializability();
    RunOptions opts;
    opts.iterations = 300;
    opts.check_histories = true;
    auto r = run_iterations(p, cfg, opts);
    EXPECT_FALSE(r.first_failure) << benchmark_name(b);
    EXPECT_EQ(r.unsound_histories, 0u);
  }
}

TEST(Microbench, CausalRunsFindEveryAnomaly) {
  for (auto b : all_benchmarks()) {
    ProgramIR p = build_benchmark(b, default_harness(b));
    for (const auto& a : p.assertions) {
      StoreConfig cfg;
      cfg.level = causal();
      EXPECT_TRUE(first_failure(p, cfg, a.name, 2000)) << a.name;
    }
  }
}

TEST(Campaign, ReportIsDeterministic) {
  ProgramIR p = build_benchmark(Benchmark::kCart, default_harness(Benchmark::kCart));
  StoreConfig cfg;
  cfg.level = causal();
  cfg.seed = 11;
  RunOptions opts;
  opts.iterations = 50;
  opts.keep_outcomes = true;
  auto a = report_to_json(run_iterations(p, cfg, opts));
  auto b = report_to_json(run_iterations(p, cfg, opts));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a["iterations"], 50);
}

TEST(Campaign, FirstFailureAgreesWithRunIterations) {
  ProgramIR p = build_benchmark(Benchmark::kStack, default_harness(Benchmark::kStack));
  StoreConfig cfg;
  cfg.level = causal();
  cfg.seed = 5;
  RunOptions opts;
  opts.iterations = 200;
  opts.keep_outcomes = true;
  auto r = run_iterations(p, cfg, opts);
  std::optional<std::size_t> expected;
  for (std::size_t i = 0; i < r.outcomes.size() && !expected; ++i) {
    for (const auto& f : r.outcomes[i].failed) {
      if (f == kUniquePops) expected = i + 1;
    }
  }
  EXPECT_EQ(first_failure(p, cfg, kUniquePops, 200), expected);
}

TEST(Campaign, CoverageIsMonotoneInIterations) {
  ProgramIR p = build_benchmark(Benchmark::kTwitter, default_harness(Benchmark::kTwitter));
  StoreConfig cfg;
  cfg.level = causal();
  std::size_t last = 0;
  for (std::size_t n : {1, 10, 50, 200}) {
    RunOptions opts;
    opts.iterations = n;
    auto r = run_iterations(p, cfg, opts);
    EXPECT_GE(r.distinct_states, last);
    last = r.distinct_states;
  }
}

}  // namespace
}  // namespace weakstore::testkit
