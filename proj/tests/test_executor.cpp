#include <gtest/gtest.h>

#include <chrono>
#include <random>
#include <set>
#include <thread>

#include "weakstore/errors.hpp"
#include "weakstore/interpreter.hpp"
#include "weakstore/isolation.hpp"
#include "weakstore/program_json.hpp"
#include "weakstore/store.hpp"
#include "weakstore/testkit/generators.hpp"

namespace weakstore {
namespace {

StoreConfig config(IsolationLevel level, std::uint64_t seed = 0) {
  StoreConfig cfg;
  cfg.level = std::move(level);
  cfg.seed = seed;
  cfg.default_value = Value(0);
  return cfg;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kEvalError;
}

// Session 1: write(k1, 1); x2 = read(k2). Session 2: write(k2, 1); x1 = read(k1).
ProgramIR store_buffering() {
  ProgramIR p;
  p.name = "store-buffering";
  p.default_value = Value(0);
  p.sessions = {{{Instruction::write(Expr::lit(Value("k1")), Expr::lit(Value(1))),
                  Instruction::read("x2", Expr::lit(Value("k2")))}},
                {{Instruction::write(Expr::lit(Value("k2")), Expr::lit(Value(1))),
                  Instruction::read("x1", Expr::lit(Value("k1")))}}};
  p.assertions = {{"not-both-zero", Expr::call("or", {Expr::call("ne", {Expr::session_var(0, "x2"), Expr::lit(Value(0))}),
                                                       Expr::call("ne", {Expr::session_var(1, "x1"), Expr::lit(Value(0))})})}};
  return p;
}

TEST(Store, LocalReadReturnsOwnWrite) {
  for (const auto& level : {read_committed(), causal(), serializability()}) {
    Store store(config(level));
    SessionId s = store.open_session();
    store.begin(s);
    store.write(s, "k", Value(5));
    EXPECT_EQ(store.read(s, "k"), Value(5));
    store.commit(s);
    History h = store.history();
    EXPECT_EQ(h.wr().size(), 0u);
  }
}

TEST(Store, FreshKeyReadsDefault) {
  Store store(config(causal()));
  SessionId s = store.open_session();
  store.begin(s);
  EXPECT_EQ(store.read(s, "never"), Value(0));
  store.commit(s);
  History h = store.history();
  EXPECT_EQ(h.wr().begin()->second, h.init_txn());
}

TEST(Store, LifecycleErrors) {
  Store store(config(causal()));
  SessionId s = store.open_session();
  EXPECT_EQ(code_of([&] { store.write(s, "k", Value(1)); }), ErrorCode::kNoLiveTransaction);
  EXPECT_EQ(code_of([&] { store.read(s, "k"); }), ErrorCode::kNoLiveTransaction);
  EXPECT_EQ(code_of([&] { store.commit(s); }), ErrorCode::kNoLiveTransaction);
  store.begin(s);
  EXPECT_EQ(code_of([&] { store.begin(s); }), ErrorCode::kLiveTransactionExists);
  EXPECT_EQ(code_of([&] { store.begin(SessionId{9}); }), ErrorCode::kUnknownSession);
  store.commit(s);
  store.begin(s);
  store.commit(s);
  History h = store.history();
  EXPECT_EQ(h.size(), 3u);
  EXPECT_TRUE(h.txn(h.session(s).back()).ops.empty());
}

TEST(Store, UncommittedWritesAreInvisible) {
  Store store(config(read_committed()));
  SessionId a = store.open_session();
  SessionId b = store.open_session();
  store.begin(a);
  store.write(a, "k", Value(1));
  EXPECT_EQ(code_of([&] { store.begin(b, std::chrono::milliseconds(20)); }), ErrorCode::kLockTimeout);
  store.commit(a);
  store.begin(b);
  // Both the initial value and the committed write are valid under RC.
  Value v = store.read(b, "k");
  EXPECT_TRUE(v == Value(0) || v == Value(1));
  store.commit(b);
}

TEST(Store, BeginBlocksUntilCommit) {
  Store store(config(serializability()));
  SessionId a = store.open_session();
  SessionId b = store.open_session();
  store.begin(a);
  store.write(a, "k", Value(1));
  Value seen;
  std::thread other([&] {
    store.begin(b);
    seen = store.read(b, "k");
    store.commit(b);
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(30));
  EXPECT_EQ(store.live_txn(b), std::nullopt);
  store.commit(a);
  other.join();
  EXPECT_EQ(seen, Value(1));
}

TEST(Store, CloseSessionCommitsLiveTransaction) {
  Store store(config(causal()));
  SessionId s = store.open_session();
  store.begin(s);
  store.write(s, "k", Value(2));
  store.close_session(s);
  EXPECT_FALSE(store.live_txn(s).has_value());
  History h = store.history();
  EXPECT_TRUE(h.txn(h.session(s).back()).committed);
}

TEST(Store, DelayStaysWithinBound) {
  StoreConfig cfg = config(causal());
  cfg.delay_max_ms = 4;
  Store store(cfg);
  SessionId s = store.open_session();
  for (int i = 0; i < 20; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    store.begin(s);
    auto waited = std::chrono::steady_clock::now() - t0;
    store.commit(s);
    EXPECT_LT(waited, std::chrono::milliseconds(50));
  }
}

TEST(Store, LatestPerSessionKeepsOneSourcePerSession) {
  History h(Value(0));
  for (int i = 1; i <= 3; ++i) {
    TxnId t = h.begin_txn(SessionId{0});
    h.append_write(t, "k", i);
    h.commit(t);
  }
  TxnId other = h.begin_txn(SessionId{1});
  h.append_write(other, "k", 10);
  h.commit(other);
  std::vector<ReadSource> all;
  for (const auto& log : h.transactions()) all.push_back({log.id, *h.final_write_value(log.id, "k")});
  auto latest = latest_per_session(h, all);
  ASSERT_EQ(latest.size(), 3u);
  EXPECT_EQ(latest[0].txn, h.init_txn());
  EXPECT_EQ(latest[1].value, Value(3));
  EXPECT_EQ(latest[2].value, Value(10));
}

TEST(Interpreter, CursorRunsLocalStepsEagerly) {
  TransactionBlock block{
      Instruction::assign("x", Expr::lit(Value(1))),
      Instruction::when(Expr::call("eq", {Expr::var("x"), Expr::lit(Value(1))}),
                        {Instruction::write(Expr::lit(Value("a")), Expr::var("x"))}),
      Instruction::for_each("v", Expr::lit(Value(Value::List{Value("p"), Value("q")})),
                            {Instruction::read("r", Expr::var("v"))}),
      Instruction::when(Expr::lit(Value(false)), {Instruction::write(Expr::lit(Value("never")), Expr::lit(Value(0)))}),
  };
  Valuation locals;
  TxnCursor c(block);
  auto a = c.next(locals);
  EXPECT_EQ(a.kind, PendingAccess::Kind::kWrite);
  EXPECT_EQ(a.key, "a");
  EXPECT_EQ(a.value, Value(1));
  a = c.next(locals);
  EXPECT_EQ(a.kind, PendingAccess::Kind::kRead);
  EXPECT_EQ(a.key, "p");
  locals["r"] = Value(7);
  a = c.next(locals);
  EXPECT_EQ(a.key, "q");
  EXPECT_EQ(locals["v"], Value("q"));
  EXPECT_EQ(c.next(locals).kind, PendingAccess::Kind::kDone);
  EXPECT_TRUE(c.done());
}

TEST(Interpreter, StoreBufferingBothZeroOnlyUnderCausal) {
  ProgramIR p = store_buffering();
  bool both_zero_cc = false;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto cc = run_program(p, config(causal(), seed));
    if (!failed_assertions(p, cc.locals).empty()) both_zero_cc = true;
    auto ser = run_program(p, config(serializability(), seed));
    EXPECT_TRUE(failed_assertions(p, ser.locals).empty()) << "seed " << seed;
  }
  EXPECT_TRUE(both_zero_cc);
}

TEST(Interpreter, SerializableSecondReaderSeesFirstWriter) {
  ProgramIR p = store_buffering();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto r = run_program(p, config(serializability(), seed));
    // Whichever session ran second reads the other's write.
    const bool s0_first = r.order.order[1] == r.history.session(SessionId{0}).front();
    if (s0_first) {
      EXPECT_EQ(r.locals[1].at("x1"), Value(1));
    } else {
      EXPECT_EQ(r.locals[0].at("x2"), Value(1));
    }
  }
}

TEST(Interpreter, DeterministicForFixedSeed) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 30; ++i) {
    ProgramIR p = testkit::random_program(rng);
    for (const auto& level : {read_committed(), causal(), serializability()}) {
      auto a = run_program(p, config(level, 77 + i));
      auto b = run_program(p, config(level, 77 + i));
      EXPECT_EQ(a.history, b.history);
      EXPECT_EQ(a.locals, b.locals);
    }
  }
}

TEST(Interpreter, HistoriesSatisfyTheLevelAndStaySerialShaped) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 150; ++i) {
    ProgramIR p = testkit::random_program(rng);
    for (const auto& level : {read_committed(), causal(), serializability()}) {
      StoreConfig cfg = config(level, i);
      cfg.latest_per_session = i % 2 == 1;
      auto r = run_program(p, cfg);
      ASSERT_TRUE(satisfies(r.history, level).satisfied) << level.display_name();
      // Sessions appear in program order within the execution order.
      std::map<SessionId, std::size_t> seen;
      for (std::size_t n = 1; n < r.order.order.size(); ++n) {
        TxnId t = r.order.order[n];
        SessionId s = *r.history.session_of(t);
        EXPECT_EQ(r.history.session_position(t), seen[s]++);
      }
    }
  }
}

TEST(Interpreter, SingleSessionIsSerializable) {
  std::mt19937_64 rng(4);
  testkit::ProgramGenOptions opts;
  opts.max_sessions = 1;
  opts.max_txns = 3;
  for (int i = 0; i < 50; ++i) {
    ProgramIR p = testkit::random_program(rng, opts);
    auto r = run_program(p, config(causal(), i));
    EXPECT_TRUE(satisfies(r.history, serializability()).satisfied);
  }
}

TEST(Interpreter, ObservableOrdersBySessionThenPosition) {
  ProgramIR p = store_buffering();
  auto r = run_program(p, config(causal(), 3));
  auto obs = observable(r.history);
  ASSERT_EQ(obs.size(), 2u);
  EXPECT_EQ(obs[0], r.locals[0].at("x2"));
  EXPECT_EQ(obs[1], r.locals[1].at("x1"));
}

TEST(Interpreter, ClockFollowsStartOrder) {
  ProgramIR p = store_buffering();
  auto r = run_program(p, config(causal(), 5));
  const auto c0 = r.locals[0].at(kClockVar).as_int();
  const auto c1 = r.locals[1].at(kClockVar).as_int();
  EXPECT_NE(c0, c1);
  EXPECT_EQ(static_cast<std::uint32_t>(std::min(c0, c1)), raw(r.order.order[1]));
}

TEST(Program, EvaluatorBuiltins) {
  Valuation vars{{"l", Value(Value::List{Value(1), Value(2), Value(2)})}, {"n", Value()}};
  EvalEnv env{&vars, nullptr};
  auto ev = [&](const Expr& e) { return eval(e, env); };
  auto l = Expr::var("l");
  auto i = [](std::int64_t x) { return Expr::lit(Value(x)); };
  EXPECT_EQ(ev(Expr::call("count", {l, i(2)})), Value(2));
  EXPECT_EQ(ev(Expr::call("remove_all", {l, i(2)})), Value(Value::List{Value(1)}));
  EXPECT_EQ(ev(Expr::call("remove_one", {l, i(2)})), Value(Value::List{Value(1), Value(2)}));
  EXPECT_EQ(ev(Expr::call("size", {Expr::var("n")})), Value(0));
  EXPECT_EQ(ev(Expr::call("nth", {l, i(5)})), Value());
  EXPECT_EQ(ev(Expr::call("union", {l, Expr::lit(Value(Value::List{Value(0)}))})),
            Value(Value::List{Value(0), Value(1), Value(2)}));
  EXPECT_EQ(ev(Expr::call("all_distinct", {l})), Value(false));
  EXPECT_EQ(ev(Expr::call("subset", {Expr::lit(Value(Value::List{Value(2)})), l})), Value(true));
  EXPECT_EQ(ev(Expr::call("forall", {Expr::lit(Value("x")), l, Expr::call("gt", {Expr::var("x"), i(0)})})), Value(true));
  EXPECT_EQ(ev(Expr::call("exists", {Expr::lit(Value("x")), l, Expr::call("gt", {Expr::var("x"), i(1)})})), Value(true));
  EXPECT_EQ(ev(Expr::call("concat", {Expr::lit(Value("k:")), i(3)})), Value("k:3"));
  EXPECT_EQ(ev(Expr::call("lt", {Expr::var("n"), i(3)})), Value(false));
  EXPECT_EQ(ev(Expr::call("eq", {Expr::var("n"), Expr::lit(Value())})), Value(true));
  EXPECT_EQ(ev(Expr::call("if", {Expr::lit(Value(true)), i(1), Expr::var("missing")})), Value(1));
  EXPECT_EQ(ev(Expr::call("and", {Expr::lit(Value(false)), Expr::var("missing")})), Value(false));
}

TEST(Program, EvaluatorErrors) {
  Valuation vars;
  EvalEnv env{&vars, nullptr};
  EXPECT_EQ(code_of([&] { eval(Expr::var("x"), env); }), ErrorCode::kEvalError);
  EXPECT_EQ(code_of([&] { eval(Expr::call("frobnicate", {}), env); }), ErrorCode::kEvalError);
  EXPECT_EQ(code_of([&] { eval(Expr::call("lt", {Expr::lit(Value(1)), Expr::lit(Value("a"))}), env); }),
            ErrorCode::kTypeError);
  EXPECT_EQ(code_of([&] { eval(Expr::call("add", {Expr::lit(Value(1))}), env); }), ErrorCode::kEvalError);
}

TEST(ProgramJson, RoundTrip) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 50; ++i) {
    ProgramIR p = testkit::random_program(rng);
    p.assertions.push_back({"a", Expr::call("eq", {Expr::session_var(0, "x0"), Expr::lit(Value(1))})});
    p.initial_locals = {{{"z", Value(Value::List{Value("q")})}}};
    ProgramIR back = parse_program(program_to_json(p).dump());
    EXPECT_EQ(program_to_json(back), program_to_json(p));
    EXPECT_EQ(run_program(back, config(causal(), i)).history, run_program(p, config(causal(), i)).history);
  }
}

TEST(ProgramJson, ParsesHandWrittenProgram) {
  const char* text = R"({
    "sessions": [[[{"op": "write", "key": {"const": "k"}, "value": 3},
                   {"op": "read", "var": "x", "key": {"const": "k"}},
                   {"op": "if", "cond": {"fn": "eq", "args": [{"var": "x"}, 3]},
                    "then": [{"op": "assign", "var": "ok", "expr": true}]}]]],
    "assertions": [{"name": "ok", "predicate": {"session_var": {"session": 0, "name": "ok"}}}]
  })";
  ProgramIR p = parse_program(text);
  auto r = run_program(p, config(causal()));
  EXPECT_TRUE(failed_assertions(p, r.locals).empty());
}

TEST(ProgramJson, RejectsMalformedPrograms) {
  EXPECT_EQ(code_of([] { parse_program("{"); }), ErrorCode::kProgramFormat);
  EXPECT_EQ(code_of([] { parse_program(R"({"sessions": [[[{"op": "jump"}]]]})"); }), ErrorCode::kProgramFormat);
  EXPECT_EQ(code_of([] { parse_program(R"({"sessions": [[[{"op": "read", "key": {"const": "k"}}]]]})"); }),
            ErrorCode::kProgramFormat);
  EXPECT_EQ(code_of([] { parse_program(R"({"sessions": [], "extra": 1})"); }), ErrorCode::kProgramFormat);
  EXPECT_EQ(code_of([] { parse_program(R"({"sessions": [[[{"op": "write", "key": {"var": 1}, "value": 1}]]]})"); }),
            ErrorCode::kProgramFormat);
}

}  // namespace
}  // namespace weakstore
