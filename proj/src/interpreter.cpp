#include "weakstore/interpreter.hpp"

#include <random>

#include "weakstore/errors.hpp"

namespace weakstore {

TxnCursor::TxnCursor(const TransactionBlock& block) {
  if (!block.empty()) frames_.push_back({&block, 0, {}, {}, 0});
}

PendingAccess TxnCursor::next(Valuation& locals) {
  EvalEnv env{&locals, nullptr};
  while (!frames_.empty()) {
    Frame& f = frames_.back();
    if (f.pc >= f.body->size()) {
      if (f.index + 1 < f.items.size()) {
        ++f.index;
        f.pc = 0;
        locals[f.loop_var] = f.items[f.index];
        continue;
      }
      frames_.pop_back();
      continue;
    }
    const Instruction& ins = (*f.body)[f.pc++];
    switch (ins.kind) {
      case Instruction::Kind::kWrite: {
        PendingAccess a{PendingAccess::Kind::kWrite, {}, key_of(eval(ins.key, env)), eval(ins.expr, env)};
        return a;
      }
      case Instruction::Kind::kRead:
        return {PendingAccess::Kind::kRead, ins.var, key_of(eval(ins.key, env)), {}};
      case Instruction::Kind::kAssign:
        locals[ins.var] = eval(ins.expr, env);
        break;
      case Instruction::Kind::kIf:
        if (eval(ins.expr, env).is_true() && !ins.body.empty()) frames_.push_back({&ins.body, 0, {}, {}, 0});
        break;
      case Instruction::Kind::kForEach: {
        Value list = eval(ins.expr, env);
        if (list.is_null() || ins.body.empty()) break;
        Value::List items = list.as_list();
        if (items.empty()) break;
        locals[ins.var] = items.front();
        frames_.push_back({&ins.body, 0, ins.var, std::move(items), 0});
        break;
      }
    }
  }
  return {};
}

void run_transaction(Store& store, SessionId s, const TransactionBlock& block, Valuation& locals) {
  const TxnId t = store.begin(s);
  locals[kClockVar] = Value(static_cast<std::int64_t>(raw(t)));
  TxnCursor cursor(block);
  for (;;) {
    PendingAccess a = cursor.next(locals);
    if (a.kind == PendingAccess::Kind::kDone) break;
    if (a.kind == PendingAccess::Kind::kWrite) {
      store.write(s, a.key, std::move(a.value));
    } else {
      locals[a.var] = store.read(s, a.key);
    }
  }
  store.commit(s);
}

Valuation initial_locals(const ProgramIR& p, std::size_t session) {
  return session < p.initial_locals.size() ? p.initial_locals[session] : Valuation{};
}

RunResult run_program(const ProgramIR& p, StoreConfig cfg) {
  if (p.default_value) cfg.default_value = *p.default_value;
  const std::uint64_t seed = cfg.seed;
  Store store(std::move(cfg));
  std::mt19937_64 sched(seed ^ 0x9e3779b97f4a7c15ULL);

  const std::size_t n = p.sessions.size();
  std::vector<SessionId> ids;
  std::vector<Valuation> locals;
  std::vector<std::size_t> next(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back(store.open_session());
    locals.push_back(initial_locals(p, i));
  }
  std::vector<std::size_t> ready;
  for (;;) {
    ready.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (next[i] < p.sessions[i].size()) ready.push_back(i);
    }
    if (ready.empty()) break;
    std::size_t i = ready[std::uniform_int_distribution<std::size_t>(0, ready.size() - 1)(sched)];
    run_transaction(store, ids[i], p.sessions[i][next[i]++], locals[i]);
  }
  return {store.history(), std::move(locals), store.execution_order()};
}

std::vector<Value> observable(const History& h) {
  std::vector<Value> out;
  for (std::uint32_t s = 0; s < h.session_count(); ++s) {
    for (TxnId t : h.session(SessionId{s})) {
      const auto& log = h.txn(t);
      for (std::size_t i = 0; i < log.ops.size(); ++i) {
        if (log.ops[i].kind == OpKind::kRead && log.is_external_read(i)) out.push_back(log.ops[i].value);
      }
    }
  }
  return out;
}

std::vector<std::string> failed_assertions(const ProgramIR& p, const std::vector<Valuation>& locals) {
  std::vector<std::string> failed;
  for (const auto& a : p.assertions) {
    bool ok = false;
    try {
      ok = eval(a.predicate, EvalEnv{nullptr, &locals}).is_true();
    } catch (const Error&) {
      ok = false;
    }
    if (!ok) failed.push_back(a.name);
  }
  return failed;
}

}  // namespace weakstore
