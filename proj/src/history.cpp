#include "weakstore/history.hpp"

#include <algorithm>
#include <functional>

#include "weakstore/errors.hpp"

namespace weakstore {

bool TransactionLog::is_external_read(std::size_t index) const {
  const Operation& op = ops.at(index);
  if (op.kind != OpKind::kRead) return false;
  for (std::size_t i = 0; i < index; ++i) {
    if (ops[i].kind == OpKind::kWrite && ops[i].key == op.key) return false;
  }
  return true;
}

std::optional<Value> TransactionLog::last_write(const Key& key) const {
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    if (it->kind == OpKind::kWrite && it->key == key) return it->value;
  }
  return std::nullopt;
}

std::vector<Operation> reads_of(const TransactionLog& t) {
  std::vector<Operation> out;
  for (std::size_t i = 0; i < t.ops.size(); ++i) {
    if (t.is_external_read(i)) out.push_back(t.ops[i]);
  }
  return out;
}

std::vector<Operation> writes_of(const TransactionLog& t) {
  std::vector<Operation> out;
  for (std::size_t i = 0; i < t.ops.size(); ++i) {
    const Operation& op = t.ops[i];
    if (op.kind != OpKind::kWrite) continue;
    bool overwritten = std::any_of(t.ops.begin() + static_cast<std::ptrdiff_t>(i) + 1, t.ops.end(),
                                   [&](const Operation& later) {
                                     return later.kind == OpKind::kWrite && later.key == op.key;
                                   });
    if (!overwritten) out.push_back(op);
  }
  return out;
}

History::History(Value default_value) : default_value_(std::move(default_value)) {
  TransactionLog init;
  init.id = TxnId{next_txn_++};
  init.committed = true;
  init_ = init.id;
  register_txn(std::move(init), std::nullopt);
}

void History::register_txn(TransactionLog log, std::optional<SessionId> session) {
  const std::size_t idx = txns_.size();
  if (!index_.emplace(log.id, idx).second) {
    throw Error(ErrorCode::kMalformedHistory, "duplicate transaction id " + to_string(log.id));
  }
  for (std::size_t i = 0; i < log.ops.size(); ++i) {
    if (!op_index_.emplace(log.ops[i].id, std::make_pair(idx, i)).second) {
      throw Error(ErrorCode::kMalformedHistory, "duplicate operation id " + to_string(log.ops[i].id));
    }
    next_op_ = std::max(next_op_, raw(log.ops[i].id) + 1);
  }
  next_txn_ = std::max(next_txn_, raw(log.id) + 1);
  if (session) {
    const auto s = raw(*session);
    if (sessions_.size() <= s) sessions_.resize(s + 1);
    placement_[log.id] = {*session, sessions_[s].size()};
    sessions_[s].push_back(log.id);
  }
  txns_.push_back(std::move(log));
}

History History::from_parts(Value default_value, TxnId init,
                            std::vector<std::vector<TransactionLog>> sessions,
                            std::map<OpId, TxnId> wr) {
  History h(std::move(default_value));
  h.txns_.clear();
  h.index_.clear();
  h.next_txn_ = 0;
  TransactionLog init_log;
  init_log.id = init;
  init_log.committed = true;
  h.init_ = init;
  h.register_txn(std::move(init_log), std::nullopt);
  h.sessions_.resize(sessions.size());
  for (std::size_t s = 0; s < sessions.size(); ++s) {
    for (auto& log : sessions[s]) {
      h.register_txn(std::move(log), SessionId{static_cast<std::uint32_t>(s)});
    }
  }
  h.wr_ = std::move(wr);
  h.validate();
  return h;
}

void History::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kMalformedHistory, msg); };

  for (const auto& [read, source] : wr_) {
    auto it = op_index_.find(read);
    if (it == op_index_.end()) fail("wr refers to unknown operation " + to_string(read));
    const TransactionLog& reader = txns_[it->second.first];
    if (!reader.is_external_read(it->second.second)) {
      fail("wr refers to " + to_string(read) + " which is not an external read");
    }
    if (!contains(source)) fail("wr source " + to_string(source) + " is unknown");
    if (source == reader.id) fail("read " + to_string(read) + " sources from its own transaction");
    const Operation& op = reader.ops[it->second.second];
    auto written = final_write_value(source, op.key);
    if (!written || *written != op.value) {
      fail("read " + to_string(read) + " returns a value its source does not finally write");
    }
    if (!txn(source).committed) fail("read " + to_string(read) + " sources from an uncommitted transaction");
  }

  for (const auto& log : txns_) {
    for (std::size_t i = 0; i < log.ops.size(); ++i) {
      const Operation& op = log.ops[i];
      if (op.key.empty()) fail("empty key in " + to_string(log.id));
      if (op.kind != OpKind::kRead) continue;
      if (log.is_external_read(i)) {
        if (!wr_.count(op.id)) fail("external read " + to_string(op.id) + " has no wr source");
      } else {
        std::optional<Value> local;
        for (std::size_t j = 0; j < i; ++j) {
          if (log.ops[j].kind == OpKind::kWrite && log.ops[j].key == op.key) local = log.ops[j].value;
        }
        if (local != op.value) fail("local read " + to_string(op.id) + " does not return the last local write");
      }
    }
  }

  for (const auto& seq : sessions_) {
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      if (!txn(seq[i]).committed) fail("uncommitted transaction " + to_string(seq[i]) + " is not last in its session");
    }
  }

  // so ∪ wr must be acyclic on transactions.
  const std::size_t n = txns_.size();
  std::vector<std::vector<std::size_t>> succ(n);
  for (const auto& seq : sessions_) {
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) succ[index_of(seq[i])].push_back(index_of(seq[i + 1]));
  }
  for (const auto& [read, source] : wr_) succ[index_of(source)].push_back(op_index_.at(read).first);
  std::vector<int> color(n, 0);
  std::function<bool(std::size_t)> cyclic = [&](std::size_t v) {
    color[v] = 1;
    for (std::size_t w : succ[v]) {
      if (color[w] == 1 || (color[w] == 0 && cyclic(w))) return true;
    }
    color[v] = 2;
    return false;
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (color[v] == 0 && cyclic(v)) fail("session order and write-read relation form a cycle");
  }
}

const TransactionLog& History::txn(TxnId id) const { return txns_[index_of(id)]; }

std::size_t History::index_of(TxnId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::kUnknownTransaction, to_string(id));
  return it->second;
}

const std::vector<TxnId>& History::session(SessionId s) const {
  if (raw(s) >= sessions_.size()) throw Error(ErrorCode::kUnknownSession, to_string(s));
  return sessions_[raw(s)];
}

std::optional<SessionId> History::session_of(TxnId id) const {
  auto it = placement_.find(id);
  if (it == placement_.end()) return std::nullopt;
  return it->second.first;
}

std::size_t History::session_position(TxnId id) const {
  auto it = placement_.find(id);
  return it == placement_.end() ? 0 : it->second.second;
}

std::optional<TxnId> History::live_txn(SessionId s) const {
  if (raw(s) >= sessions_.size() || sessions_[raw(s)].empty()) return std::nullopt;
  TxnId last = sessions_[raw(s)].back();
  if (txn(last).committed) return std::nullopt;
  return last;
}

std::optional<TxnId> History::source_of(OpId read) const {
  auto it = wr_.find(read);
  if (it == wr_.end()) return std::nullopt;
  return it->second;
}

TxnId History::txn_of(OpId op) const {
  auto it = op_index_.find(op);
  if (it == op_index_.end()) throw Error(ErrorCode::kMalformedHistory, "unknown operation " + to_string(op));
  return txns_[it->second.first].id;
}

bool History::writes_key(TxnId t, const Key& key) const {
  return t == init_ || txn(t).last_write(key).has_value();
}

std::optional<Value> History::final_write_value(TxnId t, const Key& key) const {
  if (t == init_) return default_value_;
  return txn(t).last_write(key);
}

TxnId History::begin_txn(SessionId session) {
  if (live_txn(session)) {
    throw Error(ErrorCode::kLiveTransactionExists, "session " + to_string(session) + " has a live transaction");
  }
  TransactionLog log;
  log.id = TxnId{next_txn_};
  const TxnId id = log.id;
  register_txn(std::move(log), session);
  return id;
}

TransactionLog& History::mutable_live(TxnId txn) {
  auto it = index_.find(txn);
  if (it == index_.end() || txn == init_ || txns_[it->second].committed) {
    throw Error(ErrorCode::kTxnNotLive, to_string(txn));
  }
  return txns_[it->second];
}

OpId History::append_write(TxnId txn, const Key& key, Value value) {
  TransactionLog& log = mutable_live(txn);
  if (key.empty()) throw Error(ErrorCode::kTypeError, "empty key");
  const OpId id{next_op_++};
  op_index_[id] = {index_.at(txn), log.ops.size()};
  log.ops.push_back(Operation{id, OpKind::kWrite, key, std::move(value)});
  return id;
}

OpId History::append_read(TxnId txn, const Key& key, const Value& value, TxnId source) {
  TransactionLog& log = mutable_live(txn);
  if (source == txn) throw Error(ErrorCode::kInvalidSource, "a transaction cannot read from itself");
  if (!contains(source)) throw Error(ErrorCode::kInvalidSource, "unknown source " + to_string(source));
  if (!this->txn(source).committed) throw Error(ErrorCode::kInvalidSource, "source " + to_string(source) + " is not committed");
  if (log.last_write(key)) throw Error(ErrorCode::kInvalidSource, "key " + key + " was written locally; use a local read");
  auto written = final_write_value(source, key);
  if (!written) throw Error(ErrorCode::kInvalidSource, to_string(source) + " does not write " + key);
  if (*written != value) {
    throw Error(ErrorCode::kInvalidSource, to_string(source) + " wrote " + written->to_string() + " to " + key +
                                               ", not " + value.to_string());
  }
  const OpId id{next_op_++};
  op_index_[id] = {index_.at(txn), log.ops.size()};
  log.ops.push_back(Operation{id, OpKind::kRead, key, value});
  wr_[id] = source;
  return id;
}

OpId History::append_local_read(TxnId txn, const Key& key) {
  TransactionLog& log = mutable_live(txn);
  auto local = log.last_write(key);
  if (!local) throw Error(ErrorCode::kInvalidSource, "no earlier write to " + key + " in " + to_string(txn));
  const OpId id{next_op_++};
  op_index_[id] = {index_.at(txn), log.ops.size()};
  log.ops.push_back(Operation{id, OpKind::kRead, key, *local});
  return id;
}

void History::commit(TxnId txn) { mutable_live(txn).committed = true; }

std::set<std::pair<TxnId, TxnId>> History::lift_wr(const std::optional<Key>& key) const {
  std::set<std::pair<TxnId, TxnId>> out;
  for (const auto& [read, source] : wr_) {
    const auto& [ti, oi] = op_index_.at(read);
    if (key && txns_[ti].ops[oi].key != *key) continue;
    out.emplace(source, txns_[ti].id);
  }
  return out;
}

std::vector<Key> History::keys() const {
  std::set<Key> keys;
  for (const auto& log : txns_) {
    for (const auto& op : log.ops) keys.insert(op.key);
  }
  return {keys.begin(), keys.end()};
}

bool operator==(const History& a, const History& b) {
  if (a.default_value_ != b.default_value_ || a.init_ != b.init_ || a.wr_ != b.wr_) return false;
  if (a.sessions_.size() != b.sessions_.size()) return false;
  for (std::size_t s = 0; s < a.sessions_.size(); ++s) {
    if (a.sessions_[s].size() != b.sessions_[s].size()) return false;
    for (std::size_t i = 0; i < a.sessions_[s].size(); ++i) {
      if (!(a.txn(a.sessions_[s][i]) == b.txn(b.sessions_[s][i]))) return false;
    }
  }
  return true;
}

std::pair<History, CommitOrder> prefix(const History& h, const CommitOrder& co, std::size_t n) {
  if (n > co.order.size()) throw Error(ErrorCode::kCoverageMismatch, "prefix longer than the commit order");
  std::set<TxnId> kept(co.order.begin(), co.order.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<std::vector<TransactionLog>> sessions(h.session_count());
  for (std::size_t s = 0; s < h.session_count(); ++s) {
    for (TxnId t : h.session(SessionId{static_cast<std::uint32_t>(s)})) {
      if (kept.count(t)) sessions[s].push_back(h.txn(t));
    }
  }
  std::map<OpId, TxnId> wr;
  for (const auto& [read, source] : h.wr()) {
    if (kept.count(h.txn_of(read))) wr.emplace(read, source);
  }
  // The initial transaction heads every commit order; an empty prefix
  // still keeps it since a history always contains it.
  History restricted = History::from_parts(h.default_value(), h.init_txn(), std::move(sessions), std::move(wr));
  CommitOrder restricted_co{{co.order.begin(), co.order.begin() + static_cast<std::ptrdiff_t>(n)}};
  return {std::move(restricted), std::move(restricted_co)};
}

}  // namespace weakstore
