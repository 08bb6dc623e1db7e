#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "weakstore/value.hpp"

namespace weakstore {

// Side-effect-free expressions over local variables. Calls name a builtin:
//   eq ne lt le gt ge not and or      comparisons and connectives
//   add sub                           integer arithmetic
//   concat                            string concatenation (non-strings printed)
//   list                              list literal from the arguments
//   append remove_all remove_one      list update (remove_all drops every copy)
//   contains count size nth union     list queries
//   subset                            every element of the first list occurs in the second
//   forall exists                     forall(name, list, pred) binds name per element
//   all_distinct is_null if           misc; `if` is a ternary
//   flatten                           concatenation of a list of lists
// `session_var` reads a variable of another session and is only meaningful
// in assertions evaluated after a run.
struct Expr {
  enum class Kind { kConst, kVar, kSessionVar, kCall };

  Kind kind = Kind::kConst;
  Value constant;
  std::string name;  // variable or function name
  std::uint32_t session = 0;
  std::vector<Expr> args;

  static Expr lit(Value v) { return {Kind::kConst, std::move(v), {}, 0, {}}; }
  static Expr var(std::string n) { return {Kind::kVar, {}, std::move(n), 0, {}}; }
  static Expr session_var(std::uint32_t s, std::string n) { return {Kind::kSessionVar, {}, std::move(n), s, {}}; }
  static Expr call(std::string fn, std::vector<Expr> args) { return {Kind::kCall, {}, std::move(fn), 0, std::move(args)}; }
};

using Valuation = std::map<std::string, Value>;

struct EvalEnv {
  const Valuation* locals = nullptr;
  // Final valuations of every session, for assertions.
  const std::vector<Valuation>* sessions = nullptr;
};

// Throws Error(kEvalError) on unknown variables or functions and
// Error(kTypeError) on ill-typed arguments.
Value eval(const Expr& e, const EvalEnv& env);

// Store key named by a value: strings are used verbatim.
std::string key_of(const Value& v);

struct Instruction {
  enum class Kind { kWrite, kRead, kAssign, kIf, kForEach };

  Kind kind = Kind::kAssign;
  std::string var;  // read target, assign target, loop variable
  Expr key;         // read and write
  Expr expr;        // written value, assigned value, guard, loop list
  std::vector<Instruction> body;  // if and foreach

  static Instruction write(Expr key, Expr value) { return {Kind::kWrite, {}, std::move(key), std::move(value), {}}; }
  static Instruction read(std::string var, Expr key) { return {Kind::kRead, std::move(var), std::move(key), {}, {}}; }
  static Instruction assign(std::string var, Expr e) { return {Kind::kAssign, std::move(var), {}, std::move(e), {}}; }
  static Instruction when(Expr guard, std::vector<Instruction> body) {
    return {Kind::kIf, {}, {}, std::move(guard), std::move(body)};
  }
  static Instruction for_each(std::string var, Expr list, std::vector<Instruction> body) {
    return {Kind::kForEach, std::move(var), {}, std::move(list), std::move(body)};
  }
};

using TransactionBlock = std::vector<Instruction>;

struct Assertion {
  std::string name;
  Expr predicate;  // must evaluate to true
};

// Sessions of transactions plus assertions over the sessions' final
// variables. Local variables persist across the transactions of a session.
// At each begin the interpreter sets `@clock` to the transaction's number in
// start order, which lets assertions relate operations of different
// sessions in real time.
struct ProgramIR {
  std::string name;
  std::vector<std::vector<TransactionBlock>> sessions;
  std::vector<Assertion> assertions;
  std::optional<Value> default_value;
  // Variables each session starts with.
  std::vector<Valuation> initial_locals;

  std::size_t transaction_count() const;
};

}  // namespace weakstore
