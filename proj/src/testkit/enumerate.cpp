#include "weakstore/testkit/enumerate.hpp"

#include <optional>
#include <unordered_set>

#include "weakstore/errors.hpp"
#include "weakstore/interpreter.hpp"

namespace weakstore::testkit {

std::string canonical_form(const History& h) {
  std::string out;
  auto place = [&h](TxnId t) -> std::string {
    auto s = h.session_of(t);
    if (!s) return "I";
    return std::to_string(raw(*s)) + "." + std::to_string(h.session_position(t));
  };
  for (std::uint32_t s = 0; s < h.session_count(); ++s) {
    out += "S" + std::to_string(s) + "{";
    for (TxnId t : h.session(SessionId{s})) {
      const auto& log = h.txn(t);
      out += "[";
      for (std::size_t i = 0; i < log.ops.size(); ++i) {
        const auto& op = log.ops[i];
        out += op.kind == OpKind::kWrite ? "w " : "r ";
        out += Value(op.key).to_string() + "=" + op.value.to_string();
        if (op.kind == OpKind::kRead) {
          auto src = h.source_of(op.id);
          out += src ? "<" + place(*src) : "<L";
        }
        out += ";";
      }
      out += log.committed ? "]" : "]*";
    }
    out += "}";
  }
  return out;
}

bool HistorySet::insert(const History& h) { return items_.emplace(canonical_form(h), h).second; }

std::vector<std::string> HistorySet::difference(const HistorySet& other) const {
  std::vector<std::string> out;
  for (const auto& [k, _] : items_) {
    if (!other.items_.count(k)) out.push_back(k);
  }
  for (const auto& [k, _] : other.items_) {
    if (!items_.count(k)) out.push_back(k);
  }
  return out;
}

bool operator==(const HistorySet& a, const HistorySet& b) {
  if (a.items_.size() != b.items_.size()) return false;
  for (auto ia = a.items_.begin(), ib = b.items_.begin(); ia != a.items_.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
  }
  return true;
}

namespace {

class Budget {
 public:
  explicit Budget(std::size_t cap) : cap_(cap) {}
  void tick() {
    if (++nodes_ > cap_) {
      throw Error(ErrorCode::kBudgetExceeded, "enumeration exceeded " + std::to_string(cap_) + " configurations");
    }
  }

 private:
  std::size_t cap_;
  std::size_t nodes_ = 0;
};

Valuation start_locals(const ProgramIR& p, std::size_t i) { return initial_locals(p, i); }

// ---------------------------------------------------------------------------
// Serial semantics

class SerialEnumerator {
 public:
  SerialEnumerator(const ProgramIR& p, const IsolationLevel& level, std::size_t cap)
      : p_(p), level_(level), budget_(cap) {}

  HistorySet run() {
    State st{History(p_.default_value.value_or(Value())), {}, {}, std::vector<std::size_t>(p_.sessions.size(), 0)};
    st.order.order.push_back(st.h.init_txn());
    for (std::size_t i = 0; i < p_.sessions.size(); ++i) st.locals.push_back(start_locals(p_, i));
    schedule(std::move(st));
    return std::move(out_);
  }

 private:
  struct State {
    History h;
    CommitOrder order;
    std::vector<Valuation> locals;
    std::vector<std::size_t> next;
  };

  void schedule(State st) {
    budget_.tick();
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < p_.sessions.size(); ++i) {
      if (st.next[i] < p_.sessions[i].size()) ready.push_back(i);
    }
    if (ready.empty()) {
      out_.insert(st.h);
      return;
    }
    for (std::size_t n = 0; n < ready.size(); ++n) {
      const std::size_t i = ready[n];
      State c = n + 1 == ready.size() ? std::move(st) : st;
      const TxnId t = c.h.begin_txn(SessionId{static_cast<std::uint32_t>(i)});
      c.order.order.push_back(t);
      c.locals[i][kClockVar] = Value(static_cast<std::int64_t>(raw(t)));
      TxnCursor cursor(p_.sessions[i][c.next[i]++]);
      step(std::move(c), i, t, std::move(cursor));
    }
  }

  void step(State st, std::size_t i, TxnId t, TxnCursor cursor) {
    for (;;) {
      budget_.tick();
      PendingAccess a = cursor.next(st.locals[i]);
      if (a.kind == PendingAccess::Kind::kDone) {
        st.h.commit(t);
        schedule(std::move(st));
        return;
      }
      if (a.kind == PendingAccess::Kind::kWrite) {
        st.h.append_write(t, a.key, std::move(a.value));
        continue;
      }
      if (auto local = st.h.txn(t).last_write(a.key)) {
        st.h.append_local_read(t, a.key);
        st.locals[i][a.var] = *local;
        continue;
      }
      auto sources = valid_read_sources(st.h, t, a.key, level_, st.order);
      if (sources.empty()) throw Error(ErrorCode::kInternalNoCandidate, "no valid write for " + a.key);
      for (std::size_t n = 0; n + 1 < sources.size(); ++n) {
        State c = st;
        c.h.append_read(t, a.key, sources[n].value, sources[n].txn);
        c.locals[i][a.var] = sources[n].value;
        step(std::move(c), i, t, cursor);
      }
      st.h.append_read(t, a.key, sources.back().value, sources.back().txn);
      st.locals[i][a.var] = sources.back().value;
    }
  }

  const ProgramIR& p_;
  const IsolationLevel& level_;
  Budget budget_;
  HistorySet out_;
};

// ---------------------------------------------------------------------------
// Interleaving semantics

class BaselineEnumerator {
 public:
  BaselineEnumerator(const ProgramIR& p, const IsolationLevel& level, std::size_t cap)
      : p_(p), level_(level), budget_(cap) {}

  HistorySet run() {
    State st{History(p_.default_value.value_or(Value())), {}, std::vector<Run>(p_.sessions.size())};
    for (std::size_t i = 0; i < p_.sessions.size(); ++i) st.locals.push_back(start_locals(p_, i));
    explore(std::move(st));
    HistorySet out;
    for (const auto& [_, h] : finals_.members()) {
      if (satisfies(h, level_).satisfied) out.insert(h);
    }
    return out;
  }

 private:
  struct Run {
    std::size_t next = 0;
    std::optional<TxnId> live;
    std::optional<TxnCursor> cursor;
    PendingAccess pending;  // an external read while live
  };
  struct State {
    History h;
    std::vector<Valuation> locals;
    std::vector<Run> runs;
  };

  // Runs session i until its next external read, committing at the end.
  void advance(State& st, std::size_t i) {
    Run& r = st.runs[i];
    const TxnId t = *r.live;
    for (;;) {
      PendingAccess a = r.cursor->next(st.locals[i]);
      if (a.kind == PendingAccess::Kind::kDone) {
        st.h.commit(t);
        r.live.reset();
        r.cursor.reset();
        return;
      }
      if (a.kind == PendingAccess::Kind::kWrite) {
        st.h.append_write(t, a.key, std::move(a.value));
        continue;
      }
      if (auto local = st.h.txn(t).last_write(a.key)) {
        st.h.append_local_read(t, a.key);
        st.locals[i][a.var] = *local;
        continue;
      }
      r.pending = std::move(a);
      return;
    }
  }

  void explore(State st) {
    budget_.tick();
    if (!seen_.insert(canonical_form(st.h)).second) return;
    bool moved = false;
    for (std::size_t i = 0; i < p_.sessions.size(); ++i) {
      const Run& r = st.runs[i];
      if (r.live) {
        moved = true;
        const TxnId t = *r.live;
        const Key key = r.pending.key;
        for (const auto& log : st.h.transactions()) {
          if (!log.committed || !st.h.writes_key(log.id, key)) continue;
          State c = st;
          Value v = *c.h.final_write_value(log.id, key);
          c.h.append_read(t, key, v, log.id);
          c.locals[i][c.runs[i].pending.var] = std::move(v);
          advance(c, i);
          explore(std::move(c));
        }
      } else if (r.next < p_.sessions[i].size()) {
        moved = true;
        State c = st;
        Run& cr = c.runs[i];
        const TxnId t = c.h.begin_txn(SessionId{static_cast<std::uint32_t>(i)});
        c.locals[i][kClockVar] = Value(static_cast<std::int64_t>(raw(t)));
        cr.live = t;
        cr.cursor.emplace(p_.sessions[i][cr.next++]);
        advance(c, i);
        explore(std::move(c));
      }
    }
    if (!moved) finals_.insert(st.h);
  }

  const ProgramIR& p_;
  const IsolationLevel& level_;
  Budget budget_;
  std::unordered_set<std::string> seen_;
  HistorySet finals_;
};

}  // namespace

HistorySet baseline_enumerate(const ProgramIR& p, const IsolationLevel& level, const EnumerateOptions& opts) {
  return BaselineEnumerator(p, level, opts.node_cap).run();
}

HistorySet serial_enumerate(const ProgramIR& p, const IsolationLevel& level, const EnumerateOptions& opts) {
  return SerialEnumerator(p, level, opts.node_cap).run();
}

std::set<ObservableState> observable_states(const HistorySet& histories) {
  std::set<ObservableState> out;
  for (const auto& [_, h] : histories.members()) out.insert(observable(h));
  return out;
}

std::size_t coverage(const std::vector<ObservableState>& runs) {
  return std::set<ObservableState>(runs.begin(), runs.end()).size();
}

}  // namespace weakstore::testkit
