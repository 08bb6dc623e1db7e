#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "weakstore/errors.hpp"
#include "weakstore/isolation.hpp"
#include "weakstore/testkit/generators.hpp"

namespace weakstore {
namespace {

CommitOrder order_of(std::initializer_list<std::uint32_t> ids) {
  CommitOrder co;
  for (auto i : ids) co.order.push_back(TxnId{i});
  return co;
}

TEST(ReadCommitted, DerivesEdgeFromLaterRead) {
  History h = fixtures::rc_violation();
  auto pairs = derived_pairs(h, read_committed());
  EXPECT_TRUE(pairs.count({TxnId{2}, TxnId{1}}));
  EXPECT_FALSE(satisfies_with_order(h, order_of({0, 1, 2, 3}), read_committed()));
  EXPECT_TRUE(satisfies_with_order(h, order_of({0, 2, 1, 3}), read_committed()));
  EXPECT_TRUE(satisfies(h, read_committed()).satisfied);
}

TEST(ReadCommitted, ViolatingOrderIsNotAViolatingHistory) {
  History h = fixtures::rc_violation();
  // With t2 before t1 the k1 read returns the latest write.
  EXPECT_TRUE(satisfies(h, causal()).satisfied);
  EXPECT_TRUE(satisfies(h, serializability()).satisfied);
}

TEST(Causal, ReportsCycle) {
  History h = fixtures::causal_violation();
  auto r = satisfies(h, causal());
  ASSERT_FALSE(r.satisfied);
  ASSERT_TRUE(r.violation.has_value());
  auto& cycle = r.violation->cycle;
  EXPECT_NE(std::find(cycle.begin(), cycle.end(), TxnId{1}), cycle.end());
  EXPECT_NE(std::find(cycle.begin(), cycle.end(), TxnId{2}), cycle.end());
  EXPECT_EQ(cycle.size(), 2u);
  EXPECT_EQ(r.violation->key, "k1");
  EXPECT_FALSE(satisfies(h, serializability()).satisfied);
  EXPECT_TRUE(satisfies(h, read_committed()).satisfied);
}

TEST(Causal, CartAnomalyIsCausalButNotSerializable) {
  History h = fixtures::cart_anomaly();
  auto cc = satisfies(h, causal());
  EXPECT_TRUE(cc.satisfied);
  ASSERT_TRUE(cc.witness.has_value());
  EXPECT_TRUE(satisfies_with_order(h, *cc.witness, causal()));
  EXPECT_FALSE(satisfies(h, serializability()).satisfied);
  EXPECT_TRUE(satisfies(h, read_committed()).satisfied);
}

TEST(Satisfies, AgreesWithBruteForceOnFixtures) {
  for (const History& h : {fixtures::rc_violation(), fixtures::causal_violation(), fixtures::cart_anomaly()}) {
    for (const auto& level : {read_committed(), causal(), serializability()}) {
      EXPECT_EQ(satisfies(h, level).satisfied, brute_force_satisfies(h, level)) << level.display_name();
    }
  }
}

TEST(Satisfies, WitnessExtendsSessionAndWriteRead) {
  History h = fixtures::cart_anomaly();
  auto r = satisfies(h, causal());
  ASSERT_TRUE(r.witness);
  auto pos = [&](TxnId t) {
    return std::find(r.witness->order.begin(), r.witness->order.end(), t) - r.witness->order.begin();
  };
  for (auto [a, b] : h.lift_wr()) EXPECT_LT(pos(a), pos(b));
  EXPECT_EQ(r.witness->order.front(), h.init_txn());
}

TEST(Satisfies, EmptyHistorySatisfiesEveryLevel) {
  History h;
  for (const auto& level : {read_committed(), causal(), serializability()}) {
    EXPECT_TRUE(satisfies(h, level).satisfied);
  }
}

TEST(Satisfies, SerializabilityNeedsCommitOrderForEdges) {
  History h = fixtures::cart_anomaly();
  EXPECT_THROW(derived_edges(h, serializability()), Error);
}

TEST(Satisfies, CoverageMismatchRejected) {
  History h = fixtures::rc_violation();
  try {
    satisfies_with_order(h, order_of({0, 1, 2}), read_committed());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCoverageMismatch);
  }
}

TEST(ValidReadSources, SerializabilityReadsLatestInExecutionOrder) {
  History h(Value(0));
  TxnId t1 = h.begin_txn(SessionId{0});
  h.append_write(t1, "k", 1);
  h.commit(t1);
  TxnId t2 = h.begin_txn(SessionId{1});
  auto co = order_of({0, 1, 2});
  auto ser = valid_read_sources(h, t2, "k", serializability(), co);
  ASSERT_EQ(ser.size(), 1u);
  EXPECT_EQ(ser[0].txn, t1);
  auto cc = valid_read_sources(h, t2, "k", causal(), co);
  EXPECT_EQ(cc.size(), 2u);
}

TEST(ValidReadSources, CausalExcludesOverwrittenPast) {
  History h(Value(0));
  TxnId t1 = h.begin_txn(SessionId{0});
  h.append_write(t1, "k", 1);
  h.commit(t1);
  TxnId t2 = h.begin_txn(SessionId{0});
  auto cc = valid_read_sources(h, t2, "k", causal(), order_of({0, 1, 2}));
  ASSERT_EQ(cc.size(), 1u);
  EXPECT_EQ(cc[0].value, Value(1));
}

TEST(Levels, NamesResolve) {
  EXPECT_EQ(level_by_name("rc")->name, LevelName::kReadCommitted);
  EXPECT_EQ(level_by_name("Causal")->name, LevelName::kCausal);
  EXPECT_EQ(level_by_name("serializability")->name, LevelName::kSerializability);
  EXPECT_FALSE(level_by_name("snapshot").has_value());
}


std::vector<IsolationLevel> levels() { return {read_committed(), causal(), serializability()}; }

TEST(Properties, SatisfiesMatchesBruteForce) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 300; ++i) {
    History h = testkit::random_history(rng);
    for (const auto& level : levels()) {
      auto r = satisfies(h, level);
      ASSERT_EQ(r.satisfied, brute_force_satisfies(h, level)) << level.display_name() << " case " << i;
      if (r.satisfied) {
        ASSERT_TRUE(r.witness);
        EXPECT_TRUE(satisfies_with_order(h, *r.witness, level));
      } else {
        EXPECT_TRUE(r.violation.has_value());
      }
    }
  }
}

TEST(Properties, LevelHierarchy) {
  std::mt19937_64 rng(7);
  int ser = 0, cc = 0, rc = 0;
  for (int i = 0; i < 400; ++i) {
    History h = testkit::random_history(rng);
    const bool s = satisfies(h, serializability()).satisfied;
    const bool c = satisfies(h, causal()).satisfied;
    const bool r = satisfies(h, read_committed()).satisfied;
    if (s) EXPECT_TRUE(c);
    if (c) EXPECT_TRUE(r);
    ser += s;
    cc += c;
    rc += r;
  }
  // The generator produces a mix, so the implications are not vacuous.
  EXPECT_GT(ser, 0);
  EXPECT_GT(cc, ser);
  EXPECT_GT(rc, cc);
  EXPECT_LT(rc, 400);
}

TEST(Properties, PrefixClosure) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    History h = testkit::random_history(rng);
    for (const auto& level : levels()) {
      auto r = satisfies(h, level);
      if (!r.satisfied) continue;
      for (std::size_t n = 1; n <= h.size(); ++n) {
        auto [p, pco] = prefix(h, *r.witness, n);
        EXPECT_TRUE(satisfies_with_order(p, pco, level)) << level.display_name() << " n=" << n;
      }
    }
  }
}

TEST(Properties, PhiIsMonotoneOnPrefixes) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    History h = testkit::random_history(rng);
    // Creation order extends so and wr, so it is a valid commit order to cut.
    CommitOrder co;
    for (const auto& log : h.transactions()) co.order.push_back(log.id);
    for (std::size_t n = 1; n <= h.size(); ++n) {
      auto [p, pco] = prefix(h, co, n);
      for (const auto& level : levels()) {
        auto small = derived_pairs(p, level, &pco);
        auto big = derived_pairs(h, level, &co);
        for (const auto& e : small) EXPECT_TRUE(big.count(e)) << level.display_name();
      }
    }
  }
}

TEST(Properties, AddingReadsNeverShrinksDerivedEdges) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    History h = testkit::random_history(rng);
    auto before = derived_pairs(h, causal());
    auto rc_before = derived_pairs(h, read_committed());
    const TxnId src = h.writes_key(h.transactions()[1].id, "k0") ? h.transactions()[1].id : h.init_txn();
    const TxnId t = h.begin_txn(SessionId{0});
    h.append_read(t, "k0", *h.final_write_value(src, "k0"), src);
    h.commit(t);
    auto after = derived_pairs(h, causal());
    for (const auto& e : before) EXPECT_TRUE(after.count(e));
    auto rc_after = derived_pairs(h, read_committed());
    for (const auto& e : rc_before) EXPECT_TRUE(rc_after.count(e));
  }
}

TEST(Properties, ValidSourcesProduceSatisfyingHistories) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    History h = testkit::random_history(rng);
    for (const auto& level : {read_committed(), causal()}) {
      if (!satisfies(h, level).satisfied) continue;
      History base = h;
      const TxnId t = base.begin_txn(SessionId{1});
      CommitOrder co;
      for (const auto& log : base.transactions()) co.order.push_back(log.id);
      auto sources = valid_read_sources(base, t, "k1", level, co);
      ASSERT_FALSE(sources.empty());
      // Every committed writer of k1, kept or rejected, is classified correctly.
      for (const auto& log : base.transactions()) {
        if (log.id == t || !base.writes_key(log.id, "k1")) continue;
        History ext = base;
        ext.append_read(t, "k1", *ext.final_write_value(log.id, "k1"), log.id);
        const bool ok = satisfies(ext, level).satisfied;
        const bool listed = std::any_of(sources.begin(), sources.end(), [&](const ReadSource& s) { return s.txn == log.id; });
        EXPECT_EQ(ok, listed);
      }
    }
  }
}

}  // namespace
}  // namespace weakstore
