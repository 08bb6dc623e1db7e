#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <random>

#include "weakstore/history.hpp"
#include "weakstore/isolation.hpp"

namespace weakstore {

struct StoreConfig {
  IsolationLevel level = causal();
  std::uint64_t seed = 0;
  // Restrict read candidates to the latest valid write of each session.
  bool latest_per_session = false;
  // Upper bound of the random sleep before each begin; 0 disables it.
  std::uint32_t delay_max_ms = 0;
  Value default_value;
};

// In-memory transactional key-value store that answers every external read
// with a uniformly random choice among the writes the isolation level
// allows. Transactions run one at a time: begin acquires a store-wide
// transaction lock that commit releases, so sessions may be driven from
// different threads.
class Store {
 public:
  using AccessObserver = std::function<void(OpKind, const Key&)>;

  explicit Store(StoreConfig cfg);

  SessionId open_session();
  // Commits the session's live transaction, if any.
  void close_session(SessionId s);

  // Blocks until no other session holds a live transaction. Throws
  // Error(kLockTimeout) when `timeout` elapses first and
  // Error(kLiveTransactionExists) when `s` already has one.
  TxnId begin(SessionId s, std::optional<std::chrono::milliseconds> timeout = std::nullopt);
  void write(SessionId s, const Key& key, Value value);
  Value read(SessionId s, const Key& key);
  void commit(SessionId s);

  std::optional<TxnId> live_txn(SessionId s) const;
  History history() const;
  CommitOrder execution_order() const;
  const StoreConfig& config() const noexcept { return cfg_; }

  // Called for every read and write, under the store lock.
  void set_access_observer(AccessObserver observer);

 private:
  TxnId require_live(SessionId s) const;

  const StoreConfig cfg_;
  mutable std::mutex mu_;
  std::condition_variable released_;
  std::optional<SessionId> owner_;
  History history_;
  CommitOrder exec_order_;
  std::mt19937_64 rng_;
  std::mt19937_64 delay_rng_;
  std::uint32_t next_session_ = 0;
  AccessObserver observer_;
};

// Keeps, per session (the initial transaction counting as its own), only
// the source latest in session order.
std::vector<ReadSource> latest_per_session(const History& h, const std::vector<ReadSource>& sources);

}  // namespace weakstore
