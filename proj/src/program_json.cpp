#include "weakstore/program_json.hpp"

#include "weakstore/errors.hpp"
#include "weakstore/history_json.hpp"

namespace weakstore {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::kProgramFormat, msg); }

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) bad(std::string("missing field '") + name + "' in " + j.dump());
  return j.at(name);
}

std::string string_field(const json& j, const char* name) {
  const json& f = field(j, name);
  if (!f.is_string()) bad(std::string("field '") + name + "' must be a string");
  return f.get<std::string>();
}

Value to_value(const json& j) {
  try {
    return value_from_json(j);
  } catch (const Error& e) {
    bad(e.what());
  }
}

json instr_to_json(const Instruction& ins);

json block_to_json(const std::vector<Instruction>& block) {
  json arr = json::array();
  for (const auto& ins : block) arr.push_back(instr_to_json(ins));
  return arr;
}

json instr_to_json(const Instruction& ins) {
  switch (ins.kind) {
    case Instruction::Kind::kWrite:
      return {{"op", "write"}, {"key", expr_to_json(ins.key)}, {"value", expr_to_json(ins.expr)}};
    case Instruction::Kind::kRead:
      return {{"op", "read"}, {"var", ins.var}, {"key", expr_to_json(ins.key)}};
    case Instruction::Kind::kAssign:
      return {{"op", "assign"}, {"var", ins.var}, {"expr", expr_to_json(ins.expr)}};
    case Instruction::Kind::kIf:
      return {{"op", "if"}, {"cond", expr_to_json(ins.expr)}, {"then", block_to_json(ins.body)}};
    case Instruction::Kind::kForEach:
      return {{"op", "foreach"}, {"var", ins.var}, {"in", expr_to_json(ins.expr)}, {"body", block_to_json(ins.body)}};
  }
  return {};
}

std::vector<Instruction> block_from_json(const json& j);

Instruction instr_from_json(const json& j) {
  const std::string op = string_field(j, "op");
  if (op == "write") return Instruction::write(expr_from_json(field(j, "key")), expr_from_json(field(j, "value")));
  if (op == "read") return Instruction::read(string_field(j, "var"), expr_from_json(field(j, "key")));
  if (op == "assign") return Instruction::assign(string_field(j, "var"), expr_from_json(field(j, "expr")));
  if (op == "if") return Instruction::when(expr_from_json(field(j, "cond")), block_from_json(field(j, "then")));
  if (op == "foreach") {
    return Instruction::for_each(string_field(j, "var"), expr_from_json(field(j, "in")),
                                 block_from_json(field(j, "body")));
  }
  bad("unknown instruction op '" + op + "'");
}

std::vector<Instruction> block_from_json(const json& j) {
  if (!j.is_array()) bad("instruction block must be an array");
  std::vector<Instruction> out;
  for (const auto& ij : j) out.push_back(instr_from_json(ij));
  return out;
}

}  // namespace

json expr_to_json(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kConst:
      return {{"const", value_to_json(e.constant)}};
    case Expr::Kind::kVar:
      return {{"var", e.name}};
    case Expr::Kind::kSessionVar:
      return {{"session_var", {{"session", e.session}, {"name", e.name}}}};
    case Expr::Kind::kCall: {
      json args = json::array();
      for (const auto& a : e.args) args.push_back(expr_to_json(a));
      return {{"fn", e.name}, {"args", std::move(args)}};
    }
  }
  return {};
}

Expr expr_from_json(const json& j) {
  if (j.is_null() || j.is_boolean() || j.is_number_integer()) return Expr::lit(to_value(j));
  if (!j.is_object() || j.size() != (j.contains("fn") ? 2u : 1u)) bad("malformed expression " + j.dump());
  if (j.contains("const")) return Expr::lit(to_value(j["const"]));
  if (j.contains("var")) {
    if (!j["var"].is_string()) bad("variable name must be a string");
    return Expr::var(j["var"].get<std::string>());
  }
  if (j.contains("session_var")) {
    const json& sv = j["session_var"];
    const json& s = field(sv, "session");
    if (!s.is_number_unsigned()) bad("session_var.session must be a non-negative integer");
    return Expr::session_var(s.get<std::uint32_t>(), string_field(sv, "name"));
  }
  if (j.contains("fn")) {
    const json& args = field(j, "args");
    if (!args.is_array()) bad("args must be an array");
    std::vector<Expr> parsed;
    for (const auto& a : args) parsed.push_back(expr_from_json(a));
    return Expr::call(string_field(j, "fn"), std::move(parsed));
  }
  bad("malformed expression " + j.dump());
}

json program_to_json(const ProgramIR& p) {
  json sessions = json::array();
  for (const auto& s : p.sessions) {
    json txns = json::array();
    for (const auto& t : s) txns.push_back(block_to_json(t));
    sessions.push_back(std::move(txns));
  }
  json assertions = json::array();
  for (const auto& a : p.assertions) assertions.push_back({{"name", a.name}, {"predicate", expr_to_json(a.predicate)}});
  json out = {{"name", p.name}, {"sessions", std::move(sessions)}, {"assertions", std::move(assertions)}};
  if (p.default_value) out["default"] = value_to_json(*p.default_value);
  if (!p.initial_locals.empty()) {
    json locals = json::array();
    for (const auto& vars : p.initial_locals) {
      json obj = json::object();
      for (const auto& [k, v] : vars) obj[k] = value_to_json(v);
      locals.push_back(std::move(obj));
    }
    out["locals"] = std::move(locals);
  }
  return out;
}

ProgramIR program_from_json(const json& j) {
  if (!j.is_object()) bad("program must be an object");
  for (const auto& [name, _] : j.items()) {
    if (name != "name" && name != "sessions" && name != "assertions" && name != "default" && name != "locals") {
      bad("unknown field '" + name + "' in program");
    }
  }
  ProgramIR p;
  if (j.contains("name")) p.name = string_field(j, "name");
  const json& sessions = field(j, "sessions");
  if (!sessions.is_array()) bad("sessions must be an array");
  for (const auto& s : sessions) {
    if (!s.is_array()) bad("a session must be an array of transactions");
    auto& txns = p.sessions.emplace_back();
    for (const auto& t : s) txns.push_back(block_from_json(t));
  }
  if (j.contains("assertions")) {
    if (!j["assertions"].is_array()) bad("assertions must be an array");
    for (const auto& a : j["assertions"]) p.assertions.push_back({string_field(a, "name"), expr_from_json(field(a, "predicate"))});
  }
  if (j.contains("default")) p.default_value = to_value(j["default"]);
  if (j.contains("locals")) {
    if (!j["locals"].is_array()) bad("locals must be an array");
    for (const auto& obj : j["locals"]) {
      if (!obj.is_object()) bad("locals entries must be objects");
      Valuation vars;
      for (const auto& [k, v] : obj.items()) vars[k] = to_value(v);
      p.initial_locals.push_back(std::move(vars));
    }
  }
  return p;
}

ProgramIR parse_program(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  return program_from_json(j);
}

}  // namespace weakstore
