#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "weakstore/program.hpp"

namespace weakstore {

// Program file:
//   {"name": str, "default": value, "locals": [{var: value}, ...],
//    "sessions": [[[instr, ...], ...], ...],
//    "assertions": [{"name": str, "predicate": expr}]}
// Instructions are tagged objects:
//   {"op": "write", "key": expr, "value": expr}
//   {"op": "read", "var": x, "key": expr}
//   {"op": "assign", "var": x, "expr": expr}
//   {"op": "if", "cond": expr, "then": [instr...]}
//   {"op": "foreach", "var": x, "in": expr, "body": [instr...]}
// Expressions: {"const": value}, {"var": x}, {"session_var": {"session": i, "name": x}},
// {"fn": name, "args": [expr...]}; bare numbers, booleans and null are constants.
// Format errors throw Error(kProgramFormat).
nlohmann::json program_to_json(const ProgramIR& p);
ProgramIR program_from_json(const nlohmann::json& j);
ProgramIR parse_program(const std::string& text);

nlohmann::json expr_to_json(const Expr& e);
Expr expr_from_json(const nlohmann::json& j);

}  // namespace weakstore
