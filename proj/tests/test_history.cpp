#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "weakstore/errors.hpp"
#include "weakstore/history.hpp"
#include "weakstore/history_json.hpp"
#include "weakstore/testkit/generators.hpp"

namespace weakstore {
namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kEvalError;
}

TEST(Value, OrderingAndPrinting) {
  EXPECT_LT(Value(), Value(false));
  EXPECT_LT(Value(true), Value(0));
  EXPECT_LT(Value(5), Value("a"));
  EXPECT_LT(Value("a"), Value(Value::List{}));
  EXPECT_LT(Value(1), Value(2));
  EXPECT_EQ(Value(Value::List{Value(1), Value("x")}).to_string(), "[1,\"x\"]");
  EXPECT_EQ(Value().to_string(), "null");
  EXPECT_EQ(Value(1).hash(), Value(1).hash());
  EXPECT_NE(Value(1), Value("1"));
}

TEST(Value, AccessorsCheckType) {
  EXPECT_EQ(code_of([] { (void)Value("x").as_int(); }), ErrorCode::kTypeError);
  EXPECT_EQ(Value(7).as_int(), 7);
  EXPECT_TRUE(Value(true).is_true());
  EXPECT_FALSE(Value(1).is_true());
}

TEST(History, InitialTransactionWritesEveryKey) {
  History h(Value(3));
  EXPECT_TRUE(h.writes_key(h.init_txn(), "anything"));
  EXPECT_EQ(*h.final_write_value(h.init_txn(), "anything"), Value(3));
  EXPECT_TRUE(h.txn(h.init_txn()).committed);
  EXPECT_EQ(h.size(), 1u);
}

TEST(History, SessionsAndPositions) {
  History h = fixtures::cart_anomaly();
  EXPECT_EQ(h.session_count(), 3u);
  EXPECT_EQ(h.session(SessionId{2}).size(), 2u);
  TxnId second = h.session(SessionId{2})[1];
  EXPECT_EQ(h.session_position(second), 1u);
  EXPECT_EQ(*h.session_of(second), SessionId{2});
  EXPECT_FALSE(h.session_of(h.init_txn()).has_value());
}

TEST(History, ReadRulesAreEnforced) {
  History h(Value(0));
  TxnId t1 = h.begin_txn(SessionId{0});
  h.append_write(t1, "k", 1);
  TxnId t2 = h.begin_txn(SessionId{1});
  // Sources must be committed.
  EXPECT_EQ(code_of([&] { h.append_read(t2, "k", Value(1), t1); }), ErrorCode::kInvalidSource);
  h.commit(t1);
  // The value must match the source's final write.
  EXPECT_EQ(code_of([&] { h.append_read(t2, "k", Value(2), t1); }), ErrorCode::kInvalidSource);
  // No reading from oneself.
  h.append_write(t2, "j", 4);
  EXPECT_EQ(code_of([&] { h.append_read(t2, "j", Value(4), t2); }), ErrorCode::kInvalidSource);
  // Keys written locally are read locally.
  EXPECT_EQ(code_of([&] { h.append_read(t2, "j", Value(0), h.init_txn()); }), ErrorCode::kInvalidSource);
  OpId local = h.append_local_read(t2, "j");
  EXPECT_FALSE(h.source_of(local).has_value());
  OpId ext = h.append_read(t2, "k", Value(1), t1);
  EXPECT_EQ(*h.source_of(ext), t1);
  EXPECT_EQ(h.txn_of(ext), t2);
  EXPECT_EQ(code_of([&] { h.append_local_read(t2, "zzz"); }), ErrorCode::kInvalidSource);
}

TEST(History, LiveTransactionRules) {
  History h;
  TxnId t = h.begin_txn(SessionId{0});
  EXPECT_EQ(h.live_txn(SessionId{0}), t);
  EXPECT_EQ(code_of([&] { h.begin_txn(SessionId{0}); }), ErrorCode::kLiveTransactionExists);
  h.commit(t);
  EXPECT_EQ(code_of([&] { h.append_write(t, "k", 1); }), ErrorCode::kTxnNotLive);
  EXPECT_EQ(code_of([&] { h.commit(t); }), ErrorCode::kTxnNotLive);
  EXPECT_EQ(code_of([&] { (void)h.txn(TxnId{42}); }), ErrorCode::kUnknownTransaction);
  EXPECT_FALSE(h.live_txn(SessionId{0}).has_value());
}

TEST(History, ReadsAndFinalWrites) {
  TransactionLog t;
  t.ops = {{OpId{1}, OpKind::kWrite, "a", Value(1)},
           {OpId{2}, OpKind::kRead, "a", Value(1)},
           {OpId{3}, OpKind::kRead, "b", Value(0)},
           {OpId{4}, OpKind::kWrite, "a", Value(2)},
           {OpId{5}, OpKind::kWrite, "b", Value(3)}};
  auto reads = reads_of(t);
  ASSERT_EQ(reads.size(), 1u);
  EXPECT_EQ(reads[0].key, "b");
  auto writes = writes_of(t);
  ASSERT_EQ(writes.size(), 2u);
  EXPECT_EQ(writes[0].value, Value(2));
  EXPECT_EQ(writes[1].value, Value(3));
  EXPECT_FALSE(t.is_external_read(1));
  EXPECT_TRUE(t.is_external_read(2));
}

TEST(History, LiftedWriteRead) {
  History h = fixtures::rc_violation();
  auto all = h.lift_wr();
  EXPECT_EQ(all.size(), 2u);
  auto k2 = h.lift_wr(Key("k2"));
  ASSERT_EQ(k2.size(), 1u);
  EXPECT_EQ(k2.begin()->first, TxnId{2});
  EXPECT_EQ(h.keys(), (std::vector<Key>{"k1", "k2"}));
}

TEST(History, FromPartsValidates) {
  History h = fixtures::causal_violation();
  std::vector<std::vector<TransactionLog>> sessions;
  for (std::uint32_t s = 0; s < h.session_count(); ++s) {
    auto& seq = sessions.emplace_back();
    for (TxnId t : h.session(SessionId{s})) seq.push_back(h.txn(t));
  }
  History copy = History::from_parts(h.default_value(), h.init_txn(), sessions, h.wr());
  EXPECT_EQ(copy, h);

  auto missing = h.wr();
  missing.erase(missing.begin());
  EXPECT_EQ(code_of([&] { History::from_parts(h.default_value(), h.init_txn(), sessions, missing); }),
            ErrorCode::kMalformedHistory);

  auto wrong_value = sessions;
  wrong_value[1][0].ops[0].value = Value(9);
  EXPECT_EQ(code_of([&] { History::from_parts(h.default_value(), h.init_txn(), wrong_value, h.wr()); }),
            ErrorCode::kMalformedHistory);

  // A read from a transaction that comes later in the same session.
  History cyc(Value(0));
  TxnId a = cyc.begin_txn(SessionId{0});
  cyc.append_read(a, "k", Value(0), cyc.init_txn());
  cyc.commit(a);
  TxnId b = cyc.begin_txn(SessionId{0});
  cyc.append_write(b, "k", 1);
  cyc.commit(b);
  std::vector<std::vector<TransactionLog>> cyc_sessions{{cyc.txn(a), cyc.txn(b)}};
  auto cyc_wr = cyc.wr();
  cyc_wr.begin()->second = b;
  cyc_sessions[0][0].ops[0].value = Value(1);
  EXPECT_EQ(code_of([&] { History::from_parts(Value(0), cyc.init_txn(), cyc_sessions, cyc_wr); }),
            ErrorCode::kMalformedHistory);
}

TEST(History, PrefixRestrictsEverything) {
  History h = fixtures::cart_anomaly();
  CommitOrder co{{TxnId{0}, TxnId{2}, TxnId{3}, TxnId{1}, TxnId{4}}};
  auto [p, pco] = prefix(h, co, 3);
  EXPECT_EQ(p.size(), 3u);
  EXPECT_EQ(pco.order, (std::vector<TxnId>{TxnId{0}, TxnId{2}, TxnId{3}}));
  EXPECT_EQ(p.wr().size(), 2u);
}

TEST(HistoryJson, RoundTripsFixtures) {
  for (const History& h : {fixtures::rc_violation(), fixtures::causal_violation(), fixtures::cart_anomaly()}) {
    History back = history_from_json(history_to_json(h));
    EXPECT_EQ(back, h);
    EXPECT_EQ(parse_history(history_to_json(h).dump()), h);
  }
}

TEST(HistoryJson, RoundTripsRandomHistories) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    History h = testkit::random_history(rng);
    EXPECT_EQ(history_from_json(history_to_json(h)), h);
  }
}

TEST(HistoryJson, RejectsMalformedInput) {
  auto j = history_to_json(fixtures::rc_violation());
  EXPECT_EQ(code_of([&] { parse_history("{\"sessions\": ["); }), ErrorCode::kMalformedHistory);
  auto extra = j;
  extra["bogus"] = 1;
  EXPECT_EQ(code_of([&] { history_from_json(extra); }), ErrorCode::kMalformedHistory);
  auto no_wr = j;
  no_wr.erase("wr");
  EXPECT_EQ(code_of([&] { history_from_json(no_wr); }), ErrorCode::kMalformedHistory);
  auto bad_op = j;
  bad_op["sessions"][0][0]["ops"][0]["op"] = "x";
  EXPECT_EQ(code_of([&] { history_from_json(bad_op); }), ErrorCode::kMalformedHistory);
  auto floaty = j;
  floaty["sessions"][0][0]["ops"][0]["value"] = 1.5;
  EXPECT_EQ(code_of([&] { history_from_json(floaty); }), ErrorCode::kMalformedHistory);
}

}  // namespace
}  // namespace weakstore
