#include "weakstore/program.hpp"

#include <algorithm>
#include <set>

#include "weakstore/errors.hpp"

namespace weakstore {

namespace {

[[noreturn]] void eval_error(const std::string& msg) { throw Error(ErrorCode::kEvalError, msg); }

void arity(const Expr& e, std::size_t n) {
  if (e.args.size() != n) {
    eval_error(e.name + " expects " + std::to_string(n) + " arguments, got " + std::to_string(e.args.size()));
  }
}

Value compare(const std::string& fn, const Value& a, const Value& b) {
  if (fn == "eq") return Value(a == b);
  if (fn == "ne") return Value(a != b);
  if (a.is_null() || b.is_null()) return Value(false);
  if (a.is_int() != b.is_int() || a.is_string() != b.is_string()) {
    throw Error(ErrorCode::kTypeError, "cannot order " + a.to_string() + " and " + b.to_string());
  }
  auto c = a <=> b;
  if (fn == "lt") return Value(c < 0);
  if (fn == "le") return Value(c <= 0);
  if (fn == "gt") return Value(c > 0);
  return Value(c >= 0);
}

}  // namespace

std::string key_of(const Value& v) { return v.is_string() ? v.as_string() : v.to_string(); }

Value eval(const Expr& e, const EvalEnv& env) {
  switch (e.kind) {
    case Expr::Kind::kConst:
      return e.constant;
    case Expr::Kind::kVar: {
      if (!env.locals) eval_error("no local variables in scope for " + e.name);
      auto it = env.locals->find(e.name);
      if (it == env.locals->end()) eval_error("variable " + e.name + " read before assignment");
      return it->second;
    }
    case Expr::Kind::kSessionVar: {
      if (!env.sessions || e.session >= env.sessions->size()) eval_error("no session " + std::to_string(e.session));
      const auto& vars = (*env.sessions)[e.session];
      auto it = vars.find(e.name);
      return it == vars.end() ? Value() : it->second;
    }
    case Expr::Kind::kCall:
      break;
  }

  const std::string& fn = e.name;
  // Short-circuiting forms first.
  if (fn == "and" || fn == "or") {
    const bool is_and = fn == "and";
    for (const auto& a : e.args) {
      const bool v = eval(a, env).as_bool();
      if (v != is_and) return Value(!is_and);
    }
    return Value(is_and);
  }
  if (fn == "forall" || fn == "exists") {
    // forall(name, list, predicate) binds name to each element in turn.
    arity(e, 3);
    const std::string var = eval(e.args[0], env).as_string();
    const Value list = eval(e.args[1], env);
    if (list.is_null()) return Value(fn == "forall");
    Valuation scope = env.locals ? *env.locals : Valuation{};
    EvalEnv inner{&scope, env.sessions};
    for (const auto& item : list.as_list()) {
      scope[var] = item;
      if (eval(e.args[2], inner).as_bool() != (fn == "forall")) return Value(fn != "forall");
    }
    return Value(fn == "forall");
  }
  if (fn == "if") {
    arity(e, 3);
    return eval(e.args[0], env).is_true() ? eval(e.args[1], env) : eval(e.args[2], env);
  }

  std::vector<Value> args;
  args.reserve(e.args.size());
  for (const auto& a : e.args) args.push_back(eval(a, env));

  if (fn == "eq" || fn == "ne" || fn == "lt" || fn == "le" || fn == "gt" || fn == "ge") {
    arity(e, 2);
    return compare(fn, args[0], args[1]);
  }
  if (fn == "not") {
    arity(e, 1);
    return Value(!args[0].as_bool());
  }
  if (fn == "add" || fn == "sub") {
    arity(e, 2);
    return Value(fn == "add" ? args[0].as_int() + args[1].as_int() : args[0].as_int() - args[1].as_int());
  }
  if (fn == "concat") {
    std::string out;
    for (const auto& a : args) out += key_of(a);
    return Value(std::move(out));
  }
  if (fn == "list") return Value(Value::List(args.begin(), args.end()));
  if (fn == "is_null") {
    arity(e, 1);
    return Value(args[0].is_null());
  }
  if (fn == "size") {
    arity(e, 1);
    return Value(static_cast<std::int64_t>(args[0].is_null() ? 0 : args[0].as_list().size()));
  }

  // List functions treat null as the empty list.
  auto list_arg = [&](std::size_t i) -> Value::List {
    return args[i].is_null() ? Value::List{} : args[i].as_list();
  };
  if (fn == "append") {
    arity(e, 2);
    auto l = list_arg(0);
    l.push_back(args[1]);
    return Value(std::move(l));
  }
  if (fn == "remove_all") {
    arity(e, 2);
    auto l = list_arg(0);
    l.erase(std::remove(l.begin(), l.end(), args[1]), l.end());
    return Value(std::move(l));
  }
  if (fn == "remove_one") {
    arity(e, 2);
    auto l = list_arg(0);
    auto it = std::find(l.begin(), l.end(), args[1]);
    if (it != l.end()) l.erase(it);
    return Value(std::move(l));
  }
  if (fn == "contains") {
    arity(e, 2);
    auto l = list_arg(0);
    return Value(std::find(l.begin(), l.end(), args[1]) != l.end());
  }
  if (fn == "subset") {
    arity(e, 2);
    auto a = list_arg(0);
    auto b = list_arg(1);
    return Value(std::all_of(a.begin(), a.end(), [&b](const Value& v) { return std::find(b.begin(), b.end(), v) != b.end(); }));
  }
  if (fn == "count") {
    arity(e, 2);
    auto l = list_arg(0);
    return Value(static_cast<std::int64_t>(std::count(l.begin(), l.end(), args[1])));
  }
  if (fn == "nth") {
    arity(e, 2);
    auto l = list_arg(0);
    const auto i = args[1].as_int();
    if (i < 0 || static_cast<std::size_t>(i) >= l.size()) return Value();
    return l[static_cast<std::size_t>(i)];
  }
  if (fn == "union") {
    // Set union, result sorted and duplicate-free.
    std::set<Value> s;
    for (std::size_t i = 0; i < args.size(); ++i) {
      for (auto& v : list_arg(i)) s.insert(v);
    }
    return Value(Value::List(s.begin(), s.end()));
  }
  if (fn == "flatten") {
    arity(e, 1);
    Value::List out;
    for (const auto& inner : list_arg(0)) {
      if (inner.is_null()) continue;
      for (const auto& v : inner.as_list()) out.push_back(v);
    }
    return Value(std::move(out));
  }
  if (fn == "all_distinct") {
    arity(e, 1);
    auto l = list_arg(0);
    std::set<Value> s(l.begin(), l.end());
    return Value(s.size() == l.size());
  }
  eval_error("unknown function " + fn);
}

std::size_t ProgramIR::transaction_count() const {
  std::size_t n = 0;
  for (const auto& s : sessions) n += s.size();
  return n;
}

}  // namespace weakstore
