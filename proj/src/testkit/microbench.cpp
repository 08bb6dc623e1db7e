#include "weakstore/testkit/microbench.hpp"

#include "weakstore/errors.hpp"
#include "weakstore/interpreter.hpp"

namespace weakstore::testkit {

namespace {

Expr lit(Value v) { return Expr::lit(std::move(v)); }
Expr str(const std::string& s) { return Expr::lit(Value(s)); }
Expr num(std::int64_t n) { return Expr::lit(Value(n)); }
Expr var(const std::string& n) { return Expr::var(n); }
Expr fn(const std::string& name, std::vector<Expr> args) { return Expr::call(name, std::move(args)); }
Expr no(Expr e) { return fn("not", {std::move(e)}); }

using Block = std::vector<Instruction>;

Instruction assign(const std::string& v, Expr e) { return Instruction::assign(v, std::move(e)); }
Instruction read(const std::string& v, Expr key) { return Instruction::read(v, std::move(key)); }
Instruction write(Expr key, Expr value) { return Instruction::write(std::move(key), std::move(value)); }
Instruction when(Expr guard, Block body) { return Instruction::when(std::move(guard), std::move(body)); }

// session_var(i, name) for every session, as one list.
Expr across(std::size_t sessions, const std::string& name) {
  std::vector<Expr> items;
  for (std::size_t i = 0; i < sessions; ++i) items.push_back(Expr::session_var(static_cast<std::uint32_t>(i), name));
  return fn("list", std::move(items));
}

Expr all_false(std::size_t sessions, const std::string& flag) {
  std::vector<Expr> items;
  for (std::size_t i = 0; i < sessions; ++i) items.push_back(no(Expr::session_var(static_cast<std::uint32_t>(i), flag)));
  return fn("and", std::move(items));
}

[[noreturn]] void unknown_op(Benchmark b, const BenchOp& op) {
  throw Error(ErrorCode::kProgramFormat, "unknown " + benchmark_name(b) + " operation '" + op.kind + "'");
}

void set_locals(ProgramIR& p, const Valuation& vars) {
  p.initial_locals.assign(p.sessions.size(), vars);
}

// ---------------------------------------------------------------------------

ProgramIR cart(const Harness& h) {
  ProgramIR p;
  p.name = "cart";
  p.default_value = Value(Value::List{Value("I")});
  const Expr key = str("cart:u");
  std::int64_t adds = 0;
  for (const auto& thread : h) {
    for (const auto& op : thread) adds += op.kind == "add";
  }
  // Once a session has seen the item gone, at most `adds` copies can come back.
  auto observe = [&] {
    Expr n = fn("count", {var("cart"), str("I")});
    return Block{assign("bad", fn("or", {var("bad"), fn("and", {var("zero"), fn("gt", {n, num(adds)})})})),
                 assign("zero", fn("or", {var("zero"), fn("eq", {n, num(0)})}))};
  };
  for (const auto& thread : h) {
    auto& txns = p.sessions.emplace_back();
    for (const auto& op : thread) {
      Block b{read("cart", key)};
      for (auto& ins : observe()) b.push_back(std::move(ins));
      if (op.kind == "add") {
        b.push_back(write(key, fn("append", {var("cart"), str("I")})));
      } else if (op.kind == "del") {
        b.push_back(write(key, fn("remove_all", {var("cart"), str("I")})));
        b.push_back(assign("zero", lit(Value(true))));
      } else if (op.kind != "get") {
        unknown_op(Benchmark::kCart, op);
      }
      txns.push_back(std::move(b));
    }
  }
  set_locals(p, {{"zero", Value(false)}, {"bad", Value(false)}});
  p.assertions.push_back({kNoReappearingItem, all_false(p.sessions.size(), "bad")});
  return p;
}

// ---------------------------------------------------------------------------

constexpr int kStackAttempts = 2;

void push_op(std::vector<Block>& txns, std::int64_t value) {
  const Expr node = str("node:" + std::to_string(value));
  const Expr head = str("head");
  const Expr go = no(var("done"));
  for (int attempt = 0; attempt < kStackAttempts; ++attempt) {
    Block first;
    if (attempt == 0) first.push_back(assign("done", lit(Value(false))));
    first.push_back(when(go, {read("h", head)}));
    txns.push_back(std::move(first));
    txns.push_back({when(go, {write(node, fn("list", {num(value), var("h")}))})});
    txns.push_back({when(go, {read("cur", head),
                              when(fn("eq", {var("cur"), var("h")}), {write(head, node), assign("done", lit(Value(true)))})})});
  }
}

void pop_op(std::vector<Block>& txns) {
  const Expr head = str("head");
  const Expr go = no(var("done"));
  for (int attempt = 0; attempt < kStackAttempts; ++attempt) {
    Block first;
    if (attempt == 0) first.push_back(assign("done", lit(Value(false))));
    // An empty stack ends the pop without a value.
    first.push_back(when(go, {read("h", head), when(fn("is_null", {var("h")}), {assign("done", lit(Value(true)))})}));
    txns.push_back(std::move(first));
    txns.push_back({when(go, {read("n", var("h"))})});
    Expr value = fn("nth", {var("n"), num(0)});
    txns.push_back({when(go, {read("cur", head),
                              when(fn("eq", {var("cur"), var("h")}),
                                   {write(head, fn("nth", {var("n"), num(1)})), assign("done", lit(Value(true))),
                                    when(no(fn("is_null", {value})), {assign("popped", fn("append", {var("popped"), value}))})})})});
  }
}

ProgramIR stack(const Harness& h) {
  ProgramIR p;
  p.name = "stack";
  p.default_value = Value();
  std::int64_t next_value = 1;
  for (const auto& thread : h) {
    auto& txns = p.sessions.emplace_back();
    for (const auto& op : thread) {
      if (op.kind == "push") {
        push_op(txns, next_value++);
      } else if (op.kind == "pop") {
        pop_op(txns);
      } else {
        unknown_op(Benchmark::kStack, op);
      }
    }
  }
  set_locals(p, {{"popped", Value(Value::List{})}});
  p.assertions.push_back({kUniquePops, fn("all_distinct", {fn("flatten", {across(p.sessions.size(), "popped")})})});
  return p;
}

// ---------------------------------------------------------------------------

ProgramIR twitter(const Harness& h) {
  ProgramIR p;
  p.name = "twitter";
  p.default_value = Value();
  int tweet_id = 0;
  auto tweets = [](const std::string& u) { return str("tweets:" + u); };
  for (const auto& thread : h) {
    auto& txns = p.sessions.emplace_back();
    for (const auto& op : thread) {
      if (op.kind == "tweet") {
        const std::string id = op.a + "#" + std::to_string(++tweet_id);
        txns.push_back({read("T", tweets(op.a)), write(tweets(op.a), fn("append", {var("T"), str(id)}))});
      } else if (op.kind == "follow") {
        const Expr key = str("following:" + op.a);
        txns.push_back({read("F", key), when(no(fn("contains", {var("F"), str(op.b)})),
                                             {write(key, fn("append", {var("F"), str(op.b)}))})});
      } else if (op.kind == "timeline") {
        txns.push_back({read("T", tweets(op.a)),
                        assign("timelines", fn("append", {var("timelines"),
                                                          fn("list", {var(kClockVar), str(op.a), var("T")})}))});
      } else if (op.kind == "feed") {
        txns.push_back(
            {read("FW", str("following:" + op.a)), assign("NF", lit(Value(Value::List{}))),
             Instruction::for_each("v", var("FW"),
                                   {read("T", fn("concat", {str("tweets:"), var("v")})),
                                    assign("NF", fn("union", {var("NF"), var("T")}))}),
             assign("feeds", fn("append", {var("feeds"), fn("list", {var(kClockVar), str(op.a), var("FW"), var("NF")})}))});
      } else {
        unknown_op(Benchmark::kTwitter, op);
      }
    }
  }
  set_locals(p, {{"timelines", Value(Value::List{})}, {"feeds", Value(Value::List{})}});
  // A feed that starts after a timeline view and follows that user shows
  // every tweet the view showed.
  const std::size_t n = p.sessions.size();
  Expr later_feed_ok = fn("or", {fn("ge", {fn("nth", {var("tl"), num(0)}), fn("nth", {var("f"), num(0)})}),
                                  no(fn("contains", {fn("nth", {var("f"), num(2)}), fn("nth", {var("tl"), num(1)})})),
                                  fn("subset", {fn("nth", {var("tl"), num(2)}), fn("nth", {var("f"), num(3)})})});
  p.assertions.push_back(
      {kFeedContainsTimeline,
       fn("forall", {str("tl"), fn("flatten", {across(n, "timelines")}),
                     fn("forall", {str("f"), fn("flatten", {across(n, "feeds")}), later_feed_ok})})});
  return p;
}

// ---------------------------------------------------------------------------

ProgramIR courseware(const Harness& h) {
  ProgramIR p;
  p.name = "courseware";
  p.default_value = Value();
  const Expr status = str("course:status");
  const Expr enrolled = str("course:enrolled");
  const Expr deleted = str("deleted");
  int student = 0;
  for (const auto& thread : h) {
    auto& txns = p.sessions.emplace_back();
    for (const auto& op : thread) {
      if (op.kind == "enroll") {
        const Expr s = str("s" + std::to_string(++student));
        txns.push_back(
            {read("st", status),
             when(fn("ne", {var("st"), deleted}),
                  {read("E", enrolled),
                   when(fn("and", {fn("lt", {fn("size", {var("E")}), num(kCourseCapacity)}), no(fn("contains", {var("E"), s}))}),
                        {write(enrolled, fn("append", {var("E"), s})), assign("enrolled_ok", fn("add", {var("enrolled_ok"), num(1)}))})})});
      } else if (op.kind == "delete") {
        txns.push_back({read("st", status), when(fn("ne", {var("st"), deleted}),
                                                 {write(status, deleted), write(enrolled, lit(Value(Value::List{})))})});
      } else if (op.kind == "show") {
        txns.push_back({read("st", status), read("E", enrolled),
                        when(fn("and", {fn("eq", {var("st"), deleted}), fn("gt", {fn("size", {var("E")}), num(0)})}),
                             {assign("removed_seen", lit(Value(true)))})});
      } else {
        unknown_op(Benchmark::kCourseware, op);
      }
    }
  }
  set_locals(p, {{"enrolled_ok", Value(0)}, {"removed_seen", Value(false)}});
  const std::size_t n = p.sessions.size();
  Expr sum = num(0);
  for (std::size_t i = 0; i < n; ++i) sum = fn("add", {sum, Expr::session_var(static_cast<std::uint32_t>(i), "enrolled_ok")});
  p.assertions.push_back({kWithinCapacity, fn("le", {sum, num(kCourseCapacity)})});
  p.assertions.push_back({kNoRemovedEnrollment, all_false(n, "removed_seen")});
  return p;
}

}  // namespace

std::string benchmark_name(Benchmark b) {
  switch (b) {
    case Benchmark::kCart: return "cart";
    case Benchmark::kStack: return "stack";
    case Benchmark::kTwitter: return "twitter";
    case Benchmark::kCourseware: return "courseware";
  }
  return "";
}

std::optional<Benchmark> benchmark_by_name(const std::string& name) {
  for (Benchmark b : all_benchmarks()) {
    if (benchmark_name(b) == name) return b;
  }
  return std::nullopt;
}

std::vector<Benchmark> all_benchmarks() {
  return {Benchmark::kCart, Benchmark::kStack, Benchmark::kTwitter, Benchmark::kCourseware};
}

Harness default_harness(Benchmark b) {
  switch (b) {
    case Benchmark::kCart:
      return {{{"get"}, {"add"}, {"get"}}, {{"get"}, {"del"}, {"get"}}, {{"add"}, {"get"}, {"del"}}};
    case Benchmark::kStack:
      return {{{"push"}, {"pop"}, {"pop"}}, {{"push"}, {"pop"}, {"pop"}}, {{"push"}, {"pop"}, {"pop"}}};
    case Benchmark::kTwitter:
      return {{{"tweet", "b"}, {"tweet", "b"}, {"tweet", "b"}},
              {{"timeline", "b"}, {"timeline", "b"}, {"timeline", "b"}},
              {{"follow", "a", "b"}, {"feed", "a"}, {"feed", "a"}}};
    case Benchmark::kCourseware:
      return {{{"enroll"}, {"delete"}, {"enroll"}}, {{"delete"}, {"delete"}, {"enroll"}}, {{"show"}, {"enroll"}, {"delete"}}};
  }
  return {};
}

Harness random_harness(Benchmark b, std::size_t threads, std::size_t ops, std::mt19937_64& rng) {
  std::vector<BenchOp> menu;
  switch (b) {
    case Benchmark::kCart:
      menu = {{"add"}, {"del"}, {"get"}};
      break;
    case Benchmark::kStack:
      menu = {{"push"}, {"pop"}};
      break;
    case Benchmark::kTwitter:
      menu = {{"tweet", "b"}, {"follow", "a", "b"}, {"timeline", "b"}, {"feed", "a"}};
      break;
    case Benchmark::kCourseware:
      menu = {{"enroll"}, {"delete"}, {"show"}};
      break;
  }
  Harness h(threads);
  for (auto& thread : h) {
    for (std::size_t i = 0; i < ops; ++i) {
      thread.push_back(menu[std::uniform_int_distribution<std::size_t>(0, menu.size() - 1)(rng)]);
    }
  }
  return h;
}

ProgramIR build_benchmark(Benchmark b, const Harness& h) {
  switch (b) {
    case Benchmark::kCart: return cart(h);
    case Benchmark::kStack: return stack(h);
    case Benchmark::kTwitter: return twitter(h);
    case Benchmark::kCourseware: return courseware(h);
  }
  return {};
}

}  // namespace weakstore::testkit
