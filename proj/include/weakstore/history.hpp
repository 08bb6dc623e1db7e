#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "weakstore/ids.hpp"
#include "weakstore/value.hpp"

namespace weakstore {

using Key = std::string;

enum class OpKind { kRead, kWrite };

struct Operation {
  OpId id{};
  OpKind kind = OpKind::kRead;
  Key key;
  Value value;

  friend bool operator==(const Operation&, const Operation&) = default;
};

// A transaction identifier plus its operations in program order.
struct TransactionLog {
  TxnId id{};
  std::vector<Operation> ops;
  bool committed = false;

  // Whether ops[index] is a read not preceded in program order by a write
  // to the same key.
  bool is_external_read(std::size_t index) const;

  // Value of the last write to `key`, if any.
  std::optional<Value> last_write(const Key& key) const;

  friend bool operator==(const TransactionLog&, const TransactionLog&) = default;
};

// Reads of `t` that are not preceded by a write to the same key.
std::vector<Operation> reads_of(const TransactionLog& t);

// Final write per key of `t`, in program order of those final writes.
std::vector<Operation> writes_of(const TransactionLog& t);

// Strict total order over the transactions of a history, earliest first.
struct CommitOrder {
  std::vector<TxnId> order;

  friend bool operator==(const CommitOrder&, const CommitOrder&) = default;
};

// Transactions, per-session sequences (the session order), and the
// write-read relation stored as read-op -> source transaction.
//
// The initial transaction is not part of any session; it precedes every
// other transaction and writes default_value() to every key. It holds no
// explicit operations, so the key universe stays unbounded.
class History {
 public:
  explicit History(Value default_value = Value());

  // Builds a history from its parts and checks every structural invariant
  // (unique ids, total and value-consistent wr, read-local well-formedness,
  // acyclic so ∪ wr). Throws Error(kMalformedHistory).
  static History from_parts(Value default_value, TxnId init,
                            std::vector<std::vector<TransactionLog>> sessions,
                            std::map<OpId, TxnId> wr);

  TxnId begin_txn(SessionId session);
  OpId append_write(TxnId txn, const Key& key, Value value);
  // External read: records wr(source, read).
  OpId append_read(TxnId txn, const Key& key, const Value& value, TxnId source);
  // Read following a write to the same key in the same transaction.
  OpId append_local_read(TxnId txn, const Key& key);
  void commit(TxnId txn);

  TxnId init_txn() const noexcept { return init_; }
  const Value& default_value() const noexcept { return default_value_; }

  // All transactions in creation order, the initial transaction first.
  const std::vector<TransactionLog>& transactions() const noexcept { return txns_; }
  std::size_t size() const noexcept { return txns_.size(); }
  bool contains(TxnId id) const { return index_.count(id) != 0; }
  const TransactionLog& txn(TxnId id) const;
  std::size_t index_of(TxnId id) const;

  std::size_t session_count() const noexcept { return sessions_.size(); }
  const std::vector<TxnId>& session(SessionId s) const;
  // Session of a transaction; nullopt for the initial transaction.
  std::optional<SessionId> session_of(TxnId id) const;
  // Position of a transaction inside its session sequence.
  std::size_t session_position(TxnId id) const;
  // The uncommitted last transaction of a session, if any.
  std::optional<TxnId> live_txn(SessionId s) const;

  const std::map<OpId, TxnId>& wr() const noexcept { return wr_; }
  std::optional<TxnId> source_of(OpId read) const;
  // Transaction containing an operation.
  TxnId txn_of(OpId op) const;

  // Whether `t` has a final write to `key`; always true for the initial
  // transaction.
  bool writes_key(TxnId t, const Key& key) const;
  std::optional<Value> final_write_value(TxnId t, const Key& key) const;

  // Transaction-level write-read pairs, optionally restricted to reads of
  // one key.
  std::set<std::pair<TxnId, TxnId>> lift_wr(const std::optional<Key>& key = std::nullopt) const;

  // Keys accessed by any operation, sorted.
  std::vector<Key> keys() const;

  friend bool operator==(const History& a, const History& b);

 private:
  TransactionLog& mutable_live(TxnId txn);
  void register_txn(TransactionLog log, std::optional<SessionId> session);
  void validate() const;

  Value default_value_;
  TxnId init_{};
  std::vector<TransactionLog> txns_;
  std::unordered_map<TxnId, std::size_t> index_;
  std::vector<std::vector<TxnId>> sessions_;
  std::unordered_map<TxnId, std::pair<SessionId, std::size_t>> placement_;
  std::map<OpId, TxnId> wr_;
  std::unordered_map<OpId, std::pair<std::size_t, std::size_t>> op_index_;
  std::uint32_t next_txn_ = 0;
  std::uint32_t next_op_ = 0;
};

// Restriction of ⟨h, co⟩ to the first n transactions of co, with session
// order and wr restricted accordingly.
std::pair<History, CommitOrder> prefix(const History& h, const CommitOrder& co, std::size_t n);

}  // namespace weakstore
