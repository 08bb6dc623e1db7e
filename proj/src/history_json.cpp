#include "weakstore/history_json.hpp"

#include <initializer_list>
#include <string_view>

#include "weakstore/errors.hpp"

namespace weakstore {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& msg) { throw Error(ErrorCode::kMalformedHistory, msg); }

void expect_fields(const json& j, std::string_view what, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) malformed(std::string(what) + " must be an object");
  for (const auto& [name, _] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == name;
    if (!known) malformed("unknown field '" + name + "' in " + std::string(what));
  }
  for (auto a : allowed) {
    if (!j.contains(std::string(a))) malformed("missing field '" + std::string(a) + "' in " + std::string(what));
  }
}

std::uint32_t as_id(const json& j, std::string_view what) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0 || j.get<std::int64_t>() > UINT32_MAX) {
    malformed(std::string(what) + " must be a non-negative integer");
  }
  return j.get<std::uint32_t>();
}

}  // namespace

json value_to_json(const Value& v) {
  if (v.is_null()) return nullptr;
  if (v.is_bool()) return v.as_bool();
  if (v.is_int()) return v.as_int();
  if (v.is_string()) return v.as_string();
  json arr = json::array();
  for (const auto& e : v.as_list()) arr.push_back(value_to_json(e));
  return arr;
}

Value value_from_json(const json& j) {
  if (j.is_null()) return Value();
  if (j.is_boolean()) return Value(j.get<bool>());
  if (j.is_number_integer()) return Value(j.get<std::int64_t>());
  if (j.is_string()) return Value(j.get<std::string>());
  if (j.is_array()) {
    Value::List items;
    for (const auto& e : j) items.push_back(value_from_json(e));
    return Value(std::move(items));
  }
  malformed("unsupported value " + j.dump());
}

json history_to_json(const History& h) {
  json sessions = json::array();
  for (std::size_t s = 0; s < h.session_count(); ++s) {
    json seq = json::array();
    for (TxnId t : h.session(SessionId{static_cast<std::uint32_t>(s)})) {
      const TransactionLog& log = h.txn(t);
      json ops = json::array();
      for (const auto& op : log.ops) {
        ops.push_back({{"op", op.kind == OpKind::kRead ? "r" : "w"},
                       {"key", op.key},
                       {"value", value_to_json(op.value)},
                       {"id", raw(op.id)}});
      }
      seq.push_back({{"id", raw(log.id)}, {"ops", std::move(ops)}, {"committed", log.committed}});
    }
    sessions.push_back(std::move(seq));
  }
  json wr = json::array();
  for (const auto& [read, source] : h.wr()) wr.push_back({{"read_op", raw(read)}, {"source_txn", raw(source)}});
  return {{"sessions", std::move(sessions)},
          {"wr", std::move(wr)},
          {"init", {{"txn", raw(h.init_txn())}, {"default", value_to_json(h.default_value())}}}};
}

History history_from_json(const json& j) {
  expect_fields(j, "history", {"sessions", "wr", "init"});
  expect_fields(j["init"], "init", {"txn", "default"});
  if (!j["sessions"].is_array()) malformed("sessions must be an array");
  if (!j["wr"].is_array()) malformed("wr must be an array");

  std::vector<std::vector<TransactionLog>> sessions;
  for (const auto& seq : j["sessions"]) {
    if (!seq.is_array()) malformed("each session must be an array of transactions");
    auto& out = sessions.emplace_back();
    for (const auto& tj : seq) {
      expect_fields(tj, "transaction", {"id", "ops", "committed"});
      TransactionLog log;
      log.id = TxnId{as_id(tj["id"], "transaction id")};
      if (!tj["committed"].is_boolean()) malformed("committed must be a boolean");
      log.committed = tj["committed"].get<bool>();
      if (!tj["ops"].is_array()) malformed("ops must be an array");
      for (const auto& oj : tj["ops"]) {
        expect_fields(oj, "operation", {"op", "key", "value", "id"});
        Operation op;
        op.id = OpId{as_id(oj["id"], "operation id")};
        if (oj["op"] == "r") {
          op.kind = OpKind::kRead;
        } else if (oj["op"] == "w") {
          op.kind = OpKind::kWrite;
        } else {
          malformed("op must be \"r\" or \"w\"");
        }
        if (!oj["key"].is_string()) malformed("key must be a string");
        op.key = oj["key"].get<std::string>();
        op.value = value_from_json(oj["value"]);
        log.ops.push_back(std::move(op));
      }
      out.push_back(std::move(log));
    }
  }
  std::map<OpId, TxnId> wr;
  for (const auto& ej : j["wr"]) {
    expect_fields(ej, "wr entry", {"read_op", "source_txn"});
    if (!wr.emplace(OpId{as_id(ej["read_op"], "read_op")}, TxnId{as_id(ej["source_txn"], "source_txn")}).second) {
      malformed("read has more than one wr source");
    }
  }
  return History::from_parts(value_from_json(j["init"]["default"]), TxnId{as_id(j["init"]["txn"], "init txn")},
                             std::move(sessions), std::move(wr));
}

History parse_history(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
  return history_from_json(j);
}

}  // namespace weakstore
