#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "weakstore/history.hpp"
#include "weakstore/isolation.hpp"
#include "weakstore/program.hpp"

namespace weakstore::testkit {

// Identifier-free description of a history: per session and position, each
// operation with its key and value, and for external reads the
// (session, position) of the source or "I" for the initial transaction.
// Live transactions are marked, so partial histories are covered too.
std::string canonical_form(const History& h);

// Histories up to renaming of transaction and operation ids.
class HistorySet {
 public:
  bool insert(const History& h);
  bool contains(const History& h) const { return items_.count(canonical_form(h)) != 0; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  const std::map<std::string, History>& members() const noexcept { return items_; }
  // Canonical forms present in exactly one of the sets.
  std::vector<std::string> difference(const HistorySet& other) const;

  friend bool operator==(const HistorySet& a, const HistorySet& b);

 private:
  std::map<std::string, History> items_;
};

struct EnumerateOptions {
  // Explored configurations before Error(kBudgetExceeded).
  std::size_t node_cap = 1'000'000;
};

// Every history of the interleaving semantics: transactions of different
// sessions run concurrently and external reads may return any committed
// write. Final histories are kept when they satisfy `level`. Steps that are
// invisible to other sessions (local computation, writes, begins) are
// merged with the next external read or the commit, and configurations are
// memoized on their partial history, which determines them.
HistorySet baseline_enumerate(const ProgramIR& p, const IsolationLevel& level, const EnumerateOptions& opts = {});

// Every history of the serial semantics: all submission orders of whole
// transactions times all valid read sources.
HistorySet serial_enumerate(const ProgramIR& p, const IsolationLevel& level, const EnumerateOptions& opts = {});

using ObservableState = std::vector<Value>;

std::set<ObservableState> observable_states(const HistorySet& histories);

// Number of distinct observable states among the runs.
std::size_t coverage(const std::vector<ObservableState>& runs);

}  // namespace weakstore::testkit
