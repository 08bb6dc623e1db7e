#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "weakstore/history.hpp"

namespace weakstore {

// Dense boolean relation over nodes [0, size()).
class BitRelation {
 public:
  BitRelation() = default;
  explicit BitRelation(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n_ * words_, 0) {}

  std::size_t size() const noexcept { return n_; }

  void set(std::size_t a, std::size_t b) { bits_[a * words_ + b / 64] |= std::uint64_t{1} << (b % 64); }
  bool test(std::size_t a, std::size_t b) const {
    return (bits_[a * words_ + b / 64] >> (b % 64)) & 1U;
  }
  bool row_empty(std::size_t a) const;

  BitRelation& operator|=(const BitRelation& other);
  friend BitRelation operator|(BitRelation a, const BitRelation& b) { return a |= b; }

  // {(a, c) | (a, b) ∈ this, (b, c) ∈ next}
  BitRelation compose(const BitRelation& next) const;
  BitRelation transitive_closure() const;

  template <typename F>
  void for_each_in_row(std::size_t a, F&& f) const {
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t word = bits_[a * words_ + w];
      while (word) {
        f(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
        word &= word - 1;
      }
    }
  }

 private:
  void or_row(std::size_t dst, const BitRelation& src, std::size_t src_row);

  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

// A read being considered for addition to a history: appended last in the
// program order of `txn`, sourced from `source`.
struct PendingRead {
  TxnId txn{};
  Key key;
  TxnId source{};
};

// Dense-index view of a history used to evaluate axioms. Node space:
// transactions occupy [0, txn_count()), operations follow.
class HistoryIndex {
 public:
  struct ExternalRead {
    std::size_t node = 0;
    std::size_t txn = 0;
    std::size_t key = 0;
    std::size_t source = 0;
    std::optional<OpId> op;  // nullopt for the pending read
  };

  // `include` restricts the view to a subset of transactions (the initial
  // transaction is always kept); reads whose source is excluded are dropped
  // from wr.
  explicit HistoryIndex(const History& h, const PendingRead* pending = nullptr,
                        const std::function<bool(TxnId)>& include = {});

  std::size_t txn_count() const noexcept { return txn_ids_.size(); }
  std::size_t node_count() const noexcept { return node_count_; }
  TxnId txn_id(std::size_t i) const { return txn_ids_[i]; }
  std::optional<std::size_t> find_txn(TxnId id) const;
  std::size_t txn_of_node(std::size_t node) const { return node_txn_[node]; }
  const std::vector<ExternalRead>& reads() const noexcept { return reads_; }
  const std::vector<Key>& keys() const noexcept { return keys_; }
  // Transactions with a final write to key `k` (the initial one included).
  const std::vector<std::size_t>& writers(std::size_t k) const { return writers_[k]; }
  const History& history() const noexcept { return *history_; }

  // Primitive relations, all over the full node space.
  const BitRelation& po() const noexcept { return po_; }
  const BitRelation& so() const noexcept { return so_; }
  const BitRelation& wr() const noexcept { return wr_; }
  const BitRelation& wr_txn() const noexcept { return wr_txn_; }
  // Commit order as a relation over transaction nodes. Throws
  // Error(kCoverageMismatch) unless `co` lists every indexed transaction once.
  BitRelation commit_order(const CommitOrder& co) const;

 private:
  const History* history_;
  std::vector<TxnId> txn_ids_;
  std::unordered_map<TxnId, std::size_t> txn_index_;
  std::vector<std::size_t> node_txn_;
  std::size_t node_count_ = 0;
  std::vector<ExternalRead> reads_;
  std::vector<Key> keys_;
  std::vector<std::vector<std::size_t>> writers_;
  BitRelation po_, so_, wr_, wr_txn_;
};

}  // namespace weakstore
