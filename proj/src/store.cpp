#include "weakstore/store.hpp"

#include <algorithm>
#include <map>
#include <thread>

#include "weakstore/errors.hpp"

namespace weakstore {

std::vector<ReadSource> latest_per_session(const History& h, const std::vector<ReadSource>& sources) {
  // Session key: nullopt groups the initial transaction alone.
  std::map<std::optional<SessionId>, ReadSource> latest;
  for (const auto& src : sources) {
    auto session = h.session_of(src.txn);
    auto it = latest.find(session);
    if (it == latest.end() || h.session_position(src.txn) > h.session_position(it->second.txn)) {
      latest.insert_or_assign(session, src);
    }
  }
  std::vector<ReadSource> out;
  for (const auto& [_, src] : latest) out.push_back(src);
  std::sort(out.begin(), out.end(), [](const ReadSource& a, const ReadSource& b) { return a.txn < b.txn; });
  return out;
}

Store::Store(StoreConfig cfg)
    : cfg_(std::move(cfg)),
      history_(cfg_.default_value),
      rng_(cfg_.seed),
      delay_rng_(cfg_.seed ^ 0x5deece66dULL) {
  exec_order_.order.push_back(history_.init_txn());
}

SessionId Store::open_session() {
  std::lock_guard lock(mu_);
  return SessionId{next_session_++};
}

void Store::close_session(SessionId s) {
  std::lock_guard lock(mu_);
  if (auto t = history_.live_txn(s)) {
    history_.commit(*t);
    owner_.reset();
    released_.notify_all();
  }
}

TxnId Store::begin(SessionId s, std::optional<std::chrono::milliseconds> timeout) {
  if (cfg_.delay_max_ms > 0) {
    std::uint32_t ms;
    {
      std::lock_guard lock(mu_);
      ms = std::uniform_int_distribution<std::uint32_t>(0, cfg_.delay_max_ms)(delay_rng_);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(ms));
  }
  std::unique_lock lock(mu_);
  if (raw(s) >= next_session_) throw Error(ErrorCode::kUnknownSession, to_string(s));
  if (owner_ == s) throw Error(ErrorCode::kLiveTransactionExists, "session " + to_string(s) + " has a live transaction");
  auto free = [this] { return !owner_.has_value(); };
  if (timeout) {
    if (!released_.wait_for(lock, *timeout, free)) {
      throw Error(ErrorCode::kLockTimeout, "timed out waiting for another session to commit");
    }
  } else {
    released_.wait(lock, free);
  }
  TxnId t = history_.begin_txn(s);
  owner_ = s;
  exec_order_.order.push_back(t);
  return t;
}

TxnId Store::require_live(SessionId s) const {
  auto t = history_.live_txn(s);
  if (!t) throw Error(ErrorCode::kNoLiveTransaction, "session " + to_string(s) + " has no live transaction");
  return *t;
}

void Store::write(SessionId s, const Key& key, Value value) {
  std::lock_guard lock(mu_);
  TxnId t = require_live(s);
  if (observer_) observer_(OpKind::kWrite, key);
  history_.append_write(t, key, std::move(value));
}

Value Store::read(SessionId s, const Key& key) {
  std::lock_guard lock(mu_);
  TxnId t = require_live(s);
  if (observer_) observer_(OpKind::kRead, key);
  if (history_.txn(t).last_write(key)) {
    history_.append_local_read(t, key);
    return history_.txn(t).ops.back().value;
  }
  auto sources = valid_read_sources(history_, t, key, cfg_.level, exec_order_);
  if (cfg_.latest_per_session) sources = latest_per_session(history_, sources);
  if (sources.empty()) {
    throw Error(ErrorCode::kInternalNoCandidate, "no valid write for " + key + " in " + to_string(t));
  }
  const auto& chosen = sources[std::uniform_int_distribution<std::size_t>(0, sources.size() - 1)(rng_)];
  history_.append_read(t, key, chosen.value, chosen.txn);
  return chosen.value;
}

void Store::commit(SessionId s) {
  std::lock_guard lock(mu_);
  TxnId t = require_live(s);
  history_.commit(t);
  owner_.reset();
  released_.notify_all();
}

std::optional<TxnId> Store::live_txn(SessionId s) const {
  std::lock_guard lock(mu_);
  return history_.live_txn(s);
}

History Store::history() const {
  std::lock_guard lock(mu_);
  return history_;
}

CommitOrder Store::execution_order() const {
  std::lock_guard lock(mu_);
  return exec_order_;
}

void Store::set_access_observer(AccessObserver observer) {
  std::lock_guard lock(mu_);
  observer_ = std::move(observer);
}

}  // namespace weakstore
