#pragma once

#include <optional>
#include <string>
#include <vector>

#include "weakstore/history.hpp"
#include "weakstore/program.hpp"
#include "weakstore/store.hpp"

namespace weakstore {

inline constexpr const char* kClockVar = "@clock";

// Next store access of a transaction body.
struct PendingAccess {
  enum class Kind { kRead, kWrite, kDone };

  Kind kind = Kind::kDone;
  std::string var;  // read target
  Key key;
  Value value;  // written value
};

// Walks a transaction body, running local instructions (assign, if,
// foreach) eagerly and stopping at each read or write. Copyable, so
// enumerators can fork it. The block must outlive the cursor.
class TxnCursor {
 public:
  explicit TxnCursor(const TransactionBlock& block);

  // Runs local steps against `locals` and returns the next access. After a
  // read, the caller stores the result in locals[access.var].
  PendingAccess next(Valuation& locals);
  bool done() const noexcept { return frames_.empty(); }

 private:
  struct Frame {
    const std::vector<Instruction>* body;
    std::size_t pc = 0;
    // Loop state for foreach frames.
    std::string loop_var;
    Value::List items;
    std::size_t index = 0;
  };

  std::vector<Frame> frames_;
};

// Runs a whole transaction against the store: begin, body, commit.
void run_transaction(Store& store, SessionId s, const TransactionBlock& block, Valuation& locals);

struct RunResult {
  History history;
  // Final local variables of each session.
  std::vector<Valuation> locals;
  // Transactions in the order they ran, the initial transaction first.
  CommitOrder order;
};

// Serial execution: repeatedly picks a session with remaining work
// uniformly at random and runs its next transaction to completion. The
// program's default value, when present, overrides the config's.
RunResult run_program(const ProgramIR& p, StoreConfig cfg);

// Values returned by external reads, ordered by session, then transaction,
// then program order.
std::vector<Value> observable(const History& h);

// Names of the assertions that do not evaluate to true on the final
// valuations. An assertion that raises an evaluation error counts as failed.
std::vector<std::string> failed_assertions(const ProgramIR& p, const std::vector<Valuation>& locals);

// Initial valuation of session i.
Valuation initial_locals(const ProgramIR& p, std::size_t session);

}  // namespace weakstore
