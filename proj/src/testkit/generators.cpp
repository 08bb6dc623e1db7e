#include "weakstore/testkit/generators.hpp"

namespace weakstore::testkit {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::string key_name(std::size_t i) { return "k" + std::to_string(i); }

}  // namespace

History random_history(std::mt19937_64& rng, const HistoryGenOptions& opts) {
  History h(Value(0));
  const std::size_t txns = pick(rng, 1, opts.max_txns);
  for (std::size_t n = 0; n < txns; ++n) {
    const TxnId t = h.begin_txn(SessionId{static_cast<std::uint32_t>(pick(rng, 0, opts.sessions - 1))});
    const std::size_t ops = pick(rng, 1, opts.max_ops);
    for (std::size_t o = 0; o < ops; ++o) {
      const Key key = key_name(pick(rng, 0, opts.keys - 1));
      if (pick(rng, 0, 1) == 0) {
        h.append_write(t, key, Value(static_cast<std::int64_t>(pick(rng, 1, opts.values))));
      } else if (h.txn(t).last_write(key)) {
        h.append_local_read(t, key);
      } else {
        std::vector<TxnId> writers;
        for (const auto& log : h.transactions()) {
          if (log.committed && h.writes_key(log.id, key)) writers.push_back(log.id);
        }
        const TxnId src = writers[pick(rng, 0, writers.size() - 1)];
        h.append_read(t, key, *h.final_write_value(src, key), src);
      }
    }
    h.commit(t);
  }
  return h;
}

ProgramIR random_program(std::mt19937_64& rng, const ProgramGenOptions& opts) {
  ProgramIR p;
  p.name = "random";
  p.default_value = Value(0);
  const std::size_t sessions = pick(rng, 1, opts.max_sessions);
  auto key = [&] { return Expr::lit(Value(key_name(pick(rng, 0, opts.keys - 1)))); };
  auto value = [&] { return Expr::lit(Value(static_cast<std::int64_t>(pick(rng, 1, opts.values)))); };
  for (std::size_t s = 0; s < sessions; ++s) {
    auto& txns = p.sessions.emplace_back();
    std::vector<std::string> assigned;
    std::size_t fresh = 0;
    auto read = [&] {
      std::string var = "x" + std::to_string(fresh++);
      return std::pair{Instruction::read(var, key()), var};
    };
    const std::size_t ntx = pick(rng, 1, opts.max_txns);
    for (std::size_t t = 0; t < ntx; ++t) {
      auto& block = txns.emplace_back();
      const std::size_t ops = pick(rng, 1, opts.max_ops);
      for (std::size_t o = 0; o < ops; ++o) {
        std::size_t kind = pick(rng, 0, 2);
        if (kind == 2 && assigned.empty()) kind = 1;
        if (kind == 0) {
          block.push_back(Instruction::write(key(), value()));
        } else if (kind == 1) {
          auto [ins, var] = read();
          block.push_back(std::move(ins));
          assigned.push_back(var);
        } else {
          const std::string& guard_var = assigned[pick(rng, 0, assigned.size() - 1)];
          Expr guard = Expr::call("eq", {Expr::var(guard_var), Expr::lit(Value(static_cast<std::int64_t>(pick(rng, 0, opts.values))))});
          Instruction body = pick(rng, 0, 1) == 0 ? Instruction::write(key(), value()) : read().first;
          block.push_back(Instruction::when(std::move(guard), {std::move(body)}));
        }
      }
    }
  }
  return p;
}

}  // namespace weakstore::testkit
