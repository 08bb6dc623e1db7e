#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "weakstore/history.hpp"
#include "weakstore/relation.hpp"

namespace weakstore {

// What the universally quantified α of an axiom ranges over: the read
// itself, or the transaction containing it.
enum class AlphaShape { kRead, kTransaction };

// One instance of the axiom schema
//   t1 --wr_k--> α  ∧  t2 writes k  ∧  phi(t2, α)  ⇒  t2 co-before t1.
// `phi` builds the relation phi over the node space of the index; `co` is
// non-null exactly when the axiom mentions the commit order.
struct Axiom {
  std::string name;
  AlphaShape alpha = AlphaShape::kTransaction;
  bool uses_commit_order = false;
  std::function<BitRelation(const HistoryIndex&, const BitRelation* co)> phi;
};

enum class LevelName { kReadCommitted, kCausal, kSerializability };

struct IsolationLevel {
  LevelName name = LevelName::kCausal;
  std::vector<Axiom> axioms;
  bool co_dependent = false;

  std::string display_name() const;
};

IsolationLevel read_committed();
IsolationLevel causal();
IsolationLevel serializability();
// Accepts read-committed|rc, causal|cc, serializability|ser (case-insensitive).
std::optional<IsolationLevel> level_by_name(const std::string& name);
IsolationLevel level_of(LevelName name);

// A must-precede pair forced by one axiom instance.
struct DerivedEdge {
  TxnId before{};  // t2
  TxnId after{};   // t1
  std::string axiom;
  Key key;
  TxnId reader{};
  std::optional<OpId> read;

  friend bool operator==(const DerivedEdge&, const DerivedEdge&) = default;
};

struct Violation {
  std::string axiom;
  Key key;
  TxnId t1{};
  TxnId t2{};
  TxnId alpha_txn{};
  std::optional<OpId> alpha_read;
  std::vector<TxnId> cycle;  // closed path, first element not repeated
  std::string message;
};

struct SatisfactionResult {
  bool satisfied = false;
  std::optional<CommitOrder> witness;
  std::optional<Violation> violation;

  explicit operator bool() const noexcept { return satisfied; }
};

// Every must-precede pair forced by the level's axioms. Throws
// Error(kMissingCommitOrder) for co-dependent levels without `co`.
std::vector<DerivedEdge> derived_edges(const History& h, const IsolationLevel& level,
                                       const CommitOrder* co = nullptr);
std::set<std::pair<TxnId, TxnId>> derived_pairs(const History& h, const IsolationLevel& level,
                                                const CommitOrder* co = nullptr);

// Whether some commit order extending wr ∪ so satisfies the level.
// Co-free levels: acyclicity of wr ∪ so ∪ derived edges. Co-dependent
// levels: saturation against the known must-precede relation, then a
// backtracking search over commit orders pruned by prefix closure.
SatisfactionResult satisfies(const History& h, const IsolationLevel& level);

// Whether ⟨h, co⟩ satisfies the level. Throws Error(kCoverageMismatch).
bool satisfies_with_order(const History& h, const CommitOrder& co, const IsolationLevel& level);

struct ReadSource {
  TxnId txn{};
  Value value;

  friend bool operator==(const ReadSource&, const ReadSource&) = default;
};

// Committed transactions whose final write to `key` the live `reader` may
// read while keeping the history at `level`. Co-dependent levels validate
// against `exec_order` (the serial execution order so far) extended with
// the reader. Sorted by transaction id.
std::vector<ReadSource> valid_read_sources(const History& h, TxnId reader, const Key& key,
                                           const IsolationLevel& level, const CommitOrder& exec_order);

// Reference oracle: tries every commit order extending wr ∪ so.
// Throws Error(kTooLarge) when the history has more than `cap` transactions
// (the initial transaction excluded).
bool brute_force_satisfies(const History& h, const IsolationLevel& level, std::size_t cap = 8);

}  // namespace weakstore
