#include "weakstore/relation.hpp"

#include <map>

#include "weakstore/errors.hpp"

namespace weakstore {

bool BitRelation::row_empty(std::size_t a) const {
  for (std::size_t w = 0; w < words_; ++w) {
    if (bits_[a * words_ + w]) return false;
  }
  return true;
}

void BitRelation::or_row(std::size_t dst, const BitRelation& src, std::size_t src_row) {
  for (std::size_t w = 0; w < words_; ++w) bits_[dst * words_ + w] |= src.bits_[src_row * words_ + w];
}

BitRelation& BitRelation::operator|=(const BitRelation& other) {
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= other.bits_[i];
  return *this;
}

BitRelation BitRelation::compose(const BitRelation& next) const {
  BitRelation out(n_);
  for (std::size_t a = 0; a < n_; ++a) {
    for_each_in_row(a, [&](std::size_t b) { out.or_row(a, next, b); });
  }
  return out;
}

BitRelation BitRelation::transitive_closure() const {
  BitRelation out = *this;
  std::vector<std::size_t> live_rows;
  for (std::size_t a = 0; a < n_; ++a) {
    if (!row_empty(a)) live_rows.push_back(a);
  }
  // Warshall over rows that have any successor; empty rows stay empty.
  for (std::size_t k : live_rows) {
    for (std::size_t i : live_rows) {
      if (out.test(i, k)) out.or_row(i, out, k);
    }
  }
  return out;
}

HistoryIndex::HistoryIndex(const History& h, const PendingRead* pending,
                           const std::function<bool(TxnId)>& include)
    : history_(&h) {
  for (const auto& log : h.transactions()) {
    if (log.id != h.init_txn() && include && !include(log.id)) continue;
    txn_index_[log.id] = txn_ids_.size();
    txn_ids_.push_back(log.id);
  }
  const std::size_t n = txn_ids_.size();
  node_txn_.resize(n);
  for (std::size_t i = 0; i < n; ++i) node_txn_[i] = i;

  std::map<Key, std::size_t> key_index;
  auto intern = [&](const Key& k) {
    auto [it, inserted] = key_index.emplace(k, keys_.size());
    if (inserted) keys_.push_back(k);
    return it->second;
  };

  struct OpNode {
    std::size_t node;
    std::size_t txn;
  };
  std::vector<std::vector<std::size_t>> txn_op_nodes(n);
  std::vector<std::pair<std::size_t, std::size_t>> wr_pairs;  // source txn, read node
  std::size_t next_node = n;
  std::vector<std::vector<std::size_t>> final_writes(n);

  for (std::size_t ti = 0; ti < n; ++ti) {
    const TransactionLog& log = h.txn(txn_ids_[ti]);
    for (std::size_t oi = 0; oi < log.ops.size(); ++oi) {
      const Operation& op = log.ops[oi];
      const std::size_t node = next_node++;
      node_txn_.push_back(ti);
      txn_op_nodes[ti].push_back(node);
      const std::size_t k = intern(op.key);
      if (log.is_external_read(oi)) {
        auto src = h.source_of(op.id);
        if (!src) continue;
        auto si = txn_index_.find(*src);
        if (si == txn_index_.end()) continue;
        reads_.push_back({node, ti, k, si->second, op.id});
        wr_pairs.emplace_back(si->second, node);
      }
    }
    for (const auto& w : writes_of(log)) final_writes[ti].push_back(intern(w.key));
  }
  if (pending) {
    auto ti = txn_index_.find(pending->txn);
    auto si = txn_index_.find(pending->source);
    if (ti == txn_index_.end() || si == txn_index_.end()) {
      throw Error(ErrorCode::kUnknownTransaction, "pending read refers to an unindexed transaction");
    }
    const std::size_t node = next_node++;
    node_txn_.push_back(ti->second);
    txn_op_nodes[ti->second].push_back(node);
    reads_.push_back({node, ti->second, intern(pending->key), si->second, std::nullopt});
    wr_pairs.emplace_back(si->second, node);
  }
  node_count_ = next_node;

  writers_.assign(keys_.size(), {});
  const std::size_t init = txn_index_.at(h.init_txn());
  for (std::size_t k = 0; k < keys_.size(); ++k) writers_[k].push_back(init);
  for (std::size_t ti = 0; ti < n; ++ti) {
    for (std::size_t k : final_writes[ti]) {
      if (ti != init) writers_[k].push_back(ti);
    }
  }

  po_ = BitRelation(node_count_);
  so_ = BitRelation(node_count_);
  wr_ = BitRelation(node_count_);
  wr_txn_ = BitRelation(node_count_);
  for (const auto& nodes : txn_op_nodes) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::size_t j = i + 1; j < nodes.size(); ++j) po_.set(nodes[i], nodes[j]);
    }
  }
  for (std::size_t ti = 0; ti < n; ++ti) {
    if (ti != init) so_.set(init, ti);
  }
  for (std::size_t s = 0; s < h.session_count(); ++s) {
    std::vector<std::size_t> seq;
    for (TxnId t : h.session(SessionId{static_cast<std::uint32_t>(s)})) {
      auto it = txn_index_.find(t);
      if (it != txn_index_.end()) seq.push_back(it->second);
    }
    for (std::size_t i = 0; i < seq.size(); ++i) {
      for (std::size_t j = i + 1; j < seq.size(); ++j) so_.set(seq[i], seq[j]);
    }
  }
  for (const auto& [src, node] : wr_pairs) {
    wr_.set(src, node);
    wr_txn_.set(src, node_txn_[node]);
  }
}

std::optional<std::size_t> HistoryIndex::find_txn(TxnId id) const {
  auto it = txn_index_.find(id);
  if (it == txn_index_.end()) return std::nullopt;
  return it->second;
}

BitRelation HistoryIndex::commit_order(const CommitOrder& co) const {
  if (co.order.size() != txn_count()) {
    throw Error(ErrorCode::kCoverageMismatch, "commit order has " + std::to_string(co.order.size()) +
                                                  " transactions, history has " + std::to_string(txn_count()));
  }
  std::vector<std::size_t> seq;
  std::vector<bool> seen(txn_count(), false);
  for (TxnId t : co.order) {
    auto i = find_txn(t);
    if (!i || seen[*i]) throw Error(ErrorCode::kCoverageMismatch, "commit order does not cover " + to_string(t) + " exactly once");
    seen[*i] = true;
    seq.push_back(*i);
  }
  BitRelation rel(node_count_);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    for (std::size_t j = i + 1; j < seq.size(); ++j) rel.set(seq[i], seq[j]);
  }
  return rel;
}

}  // namespace weakstore
