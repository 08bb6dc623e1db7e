#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "weakstore/history.hpp"
#include "weakstore/value.hpp"

namespace weakstore {

// Values map to JSON null, booleans, integers, strings and arrays.
nlohmann::json value_to_json(const Value& v);
// Throws Error(kMalformedHistory) for floats and objects.
Value value_from_json(const nlohmann::json& j);

// History JSON:
//   {"sessions": [[{"id", "ops": [{"op": "r"|"w", "key", "value", "id"}], "committed"}]],
//    "wr": [{"read_op", "source_txn"}], "init": {"txn", "default"}}
// Unknown fields are rejected.
nlohmann::json history_to_json(const History& h);
History history_from_json(const nlohmann::json& j);
// Parses text; syntax errors surface as Error(kMalformedHistory).
History parse_history(const std::string& text);

}  // namespace weakstore
