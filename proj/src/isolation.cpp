#include "weakstore/isolation.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>

#include "weakstore/errors.hpp"

namespace weakstore {

namespace {

Axiom read_committed_axiom() {
  return {"ReadCommitted", AlphaShape::kRead, false,
          [](const HistoryIndex& idx, const BitRelation*) { return idx.wr().compose(idx.po()); }};
}

Axiom causal_axiom() {
  return {"Causal", AlphaShape::kTransaction, false,
          [](const HistoryIndex& idx, const BitRelation*) { return (idx.wr_txn() | idx.so()).transitive_closure(); }};
}

Axiom serializability_axiom() {
  return {"Serializability", AlphaShape::kTransaction, true,
          [](const HistoryIndex&, const BitRelation* co) { return *co; }};
}

struct Instance {
  std::size_t before;  // t2
  std::size_t after;   // t1
  const Axiom* axiom;
  const HistoryIndex::ExternalRead* read;
};

template <typename F>
void for_each_instance(const HistoryIndex& idx, const IsolationLevel& level, const BitRelation* co, F&& f) {
  for (const Axiom& axiom : level.axioms) {
    if (axiom.uses_commit_order && co == nullptr) {
      throw Error(ErrorCode::kMissingCommitOrder, axiom.name + " needs a commit order");
    }
    const BitRelation phi = axiom.phi(idx, axiom.uses_commit_order ? co : nullptr);
    for (const auto& r : idx.reads()) {
      const std::size_t alpha = axiom.alpha == AlphaShape::kRead ? r.node : r.txn;
      for (std::size_t t2 : idx.writers(r.key)) {
        if (t2 != r.source && phi.test(t2, alpha)) f(Instance{t2, r.source, &axiom, &r});
      }
    }
  }
}

BitRelation base_order(const HistoryIndex& idx) { return idx.so() | idx.wr_txn(); }

DerivedEdge to_edge(const HistoryIndex& idx, const Instance& in) {
  return {idx.txn_id(in.before), idx.txn_id(in.after), in.axiom->name, idx.keys()[in.read->key],
          idx.txn_id(in.read->txn), in.read->op};
}

// Whether ⟨idx, co⟩ satisfies the level, co given as a relation.
bool order_satisfies(const HistoryIndex& idx, const BitRelation& co, const IsolationLevel& level) {
  const BitRelation base = base_order(idx);
  for (std::size_t a = 0; a < idx.txn_count(); ++a) {
    bool ok = true;
    base.for_each_in_row(a, [&](std::size_t b) { ok = ok && co.test(a, b); });
    if (!ok) return false;
  }
  bool ok = true;
  for_each_instance(idx, level, &co, [&](const Instance& in) { ok = ok && co.test(in.before, in.after); });
  return ok;
}

// Transaction-level graph: adjacency with provenance of derived edges.
struct Graph {
  std::vector<std::vector<std::size_t>> succ;
  std::map<std::pair<std::size_t, std::size_t>, DerivedEdge> derived;

  explicit Graph(std::size_t n) : succ(n) {}

  void add(std::size_t a, std::size_t b) {
    if (std::find(succ[a].begin(), succ[a].end(), b) == succ[a].end()) succ[a].push_back(b);
  }
};

Graph build_graph(const HistoryIndex& idx, const BitRelation& base) {
  Graph g(idx.txn_count());
  for (std::size_t a = 0; a < idx.txn_count(); ++a) {
    base.for_each_in_row(a, [&](std::size_t b) { g.add(a, b); });
  }
  return g;
}

// Shortest path from `from` to `to`, inclusive, or empty.
std::vector<std::size_t> shortest_path(const Graph& g, std::size_t from, std::size_t to) {
  std::vector<std::size_t> parent(g.succ.size(), SIZE_MAX);
  std::deque<std::size_t> queue{from};
  parent[from] = from;
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    if (v == to) {
      std::vector<std::size_t> path{to};
      while (path.back() != from) path.push_back(parent[path.back()]);
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (std::size_t w : g.succ[v]) {
      if (parent[w] == SIZE_MAX) {
        parent[w] = v;
        queue.push_back(w);
      }
    }
  }
  return {};
}

// Kahn's algorithm, smallest index first; nullopt on a cycle.
std::optional<std::vector<std::size_t>> topological_order(const Graph& g) {
  const std::size_t n = g.succ.size();
  std::vector<std::size_t> indeg(n, 0);
  for (const auto& s : g.succ) {
    for (std::size_t w : s) ++indeg[w];
  }
  std::set<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indeg[v] == 0) ready.insert(v);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    std::size_t v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (std::size_t w : g.succ[v]) {
      if (--indeg[w] == 0) ready.insert(w);
    }
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

// Reports the shortest cycle closed by a derived edge, else any cycle.
Violation describe_cycle(const HistoryIndex& idx, const Graph& g, const IsolationLevel& level) {
  std::optional<Violation> best;
  for (const auto& [pair, edge] : g.derived) {
    auto path = shortest_path(g, pair.second, pair.first);
    if (path.empty()) continue;
    if (best && best->cycle.size() <= path.size()) continue;
    Violation v;
    v.axiom = edge.axiom;
    v.key = edge.key;
    v.t1 = edge.after;
    v.t2 = edge.before;
    v.alpha_txn = edge.reader;
    v.alpha_read = edge.read;
    for (std::size_t i : path) v.cycle.push_back(idx.txn_id(i));
    v.message = to_string(edge.before) + " must commit before " + to_string(edge.after) + " (" + edge.axiom +
                " on key " + edge.key + ") but " + to_string(edge.after) + " already precedes it";
    best = std::move(v);
  }
  if (best) return *best;
  Violation v;
  v.axiom = level.display_name();
  v.message = "session order and write-read relation are cyclic";
  return v;
}

CommitOrder to_commit_order(const HistoryIndex& idx, const std::vector<std::size_t>& order) {
  CommitOrder co;
  for (std::size_t i : order) co.order.push_back(idx.txn_id(i));
  return co;
}

SatisfactionResult satisfies_co_free(const HistoryIndex& idx, const IsolationLevel& level) {
  Graph g = build_graph(idx, base_order(idx));
  for_each_instance(idx, level, nullptr, [&](const Instance& in) {
    g.add(in.before, in.after);
    g.derived.emplace(std::make_pair(in.before, in.after), to_edge(idx, in));
  });
  SatisfactionResult result;
  if (auto order = topological_order(g)) {
    result.satisfied = true;
    result.witness = to_commit_order(idx, *order);
  } else {
    result.violation = describe_cycle(idx, g, level);
  }
  return result;
}

class OrderSearch {
 public:
  OrderSearch(const History& h, const HistoryIndex& idx, const BitRelation& must, const IsolationLevel& level)
      : h_(h), idx_(idx), must_(must), level_(level), placed_(idx.txn_count(), false) {}

  std::optional<std::vector<std::size_t>> run() {
    if (extend()) return order_;
    return std::nullopt;
  }

 private:
  bool prefix_ok() {
    std::set<TxnId> placed;
    for (std::size_t i : order_) placed.insert(idx_.txn_id(i));
    HistoryIndex sub(h_, nullptr, [&](TxnId t) { return placed.count(t) != 0; });
    CommitOrder co;
    for (std::size_t i : order_) co.order.push_back(idx_.txn_id(i));
    return order_satisfies(sub, sub.commit_order(co), level_);
  }

  bool extend() {
    if (order_.size() == placed_.size()) return true;
    for (std::size_t t = 0; t < placed_.size(); ++t) {
      if (placed_[t] || !predecessors_placed(t)) continue;
      placed_[t] = true;
      order_.push_back(t);
      // Prefix closure: a failing prefix cannot be completed.
      if (prefix_ok() && extend()) return true;
      order_.pop_back();
      placed_[t] = false;
    }
    return false;
  }

  bool predecessors_placed(std::size_t t) const {
    for (std::size_t p = 0; p < placed_.size(); ++p) {
      if (!placed_[p] && p != t && must_.test(p, t)) return false;
    }
    return true;
  }

  const History& h_;
  const HistoryIndex& idx_;
  const BitRelation& must_;
  const IsolationLevel& level_;
  std::vector<bool> placed_;
  std::vector<std::size_t> order_;
};

SatisfactionResult satisfies_co_dependent(const History& h, const HistoryIndex& idx, const IsolationLevel& level) {
  // Saturation: phi is monotone in co, so instances evaluated against the
  // known must-precede relation are forced in every valid commit order.
  Graph g = build_graph(idx, base_order(idx));
  BitRelation known = base_order(idx);
  for (;;) {
    BitRelation closure = known.transitive_closure();
    bool cyclic = false;
    for (std::size_t t = 0; t < idx.txn_count(); ++t) cyclic = cyclic || closure.test(t, t);
    if (cyclic) return {false, std::nullopt, describe_cycle(idx, g, level)};
    bool grew = false;
    for_each_instance(idx, level, &closure, [&](const Instance& in) {
      if (!closure.test(in.before, in.after) && !known.test(in.before, in.after)) {
        known.set(in.before, in.after);
        g.add(in.before, in.after);
        g.derived.emplace(std::make_pair(in.before, in.after), to_edge(idx, in));
        grew = true;
      }
    });
    if (!grew) {
      known = closure;
      break;
    }
  }

  OrderSearch search(h, idx, known, level);
  if (auto order = search.run()) return {true, to_commit_order(idx, *order), std::nullopt};
  Violation v;
  v.axiom = level.display_name();
  v.message = "no commit order extending the must-precede relation satisfies " + level.display_name();
  return {false, std::nullopt, v};
}

}  // namespace

std::string IsolationLevel::display_name() const {
  switch (name) {
    case LevelName::kReadCommitted: return "ReadCommitted";
    case LevelName::kCausal: return "Causal";
    case LevelName::kSerializability: return "Serializability";
  }
  return "Unknown";
}

IsolationLevel read_committed() { return {LevelName::kReadCommitted, {read_committed_axiom()}, false}; }
IsolationLevel causal() { return {LevelName::kCausal, {causal_axiom()}, false}; }
IsolationLevel serializability() { return {LevelName::kSerializability, {serializability_axiom()}, true}; }

IsolationLevel level_of(LevelName name) {
  switch (name) {
    case LevelName::kReadCommitted: return read_committed();
    case LevelName::kCausal: return causal();
    case LevelName::kSerializability: return serializability();
  }
  return causal();
}

std::optional<IsolationLevel> level_by_name(const std::string& name) {
  std::string n;
  for (char c : name) n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (n == "read-committed" || n == "readcommitted" || n == "rc") return read_committed();
  if (n == "causal" || n == "cc") return causal();
  if (n == "serializability" || n == "serializable" || n == "ser") return serializability();
  return std::nullopt;
}

std::vector<DerivedEdge> derived_edges(const History& h, const IsolationLevel& level, const CommitOrder* co) {
  HistoryIndex idx(h);
  std::optional<BitRelation> co_rel;
  if (co) co_rel = idx.commit_order(*co);
  std::vector<DerivedEdge> out;
  for_each_instance(idx, level, co_rel ? &*co_rel : nullptr,
                    [&](const Instance& in) { out.push_back(to_edge(idx, in)); });
  return out;
}

std::set<std::pair<TxnId, TxnId>> derived_pairs(const History& h, const IsolationLevel& level, const CommitOrder* co) {
  std::set<std::pair<TxnId, TxnId>> out;
  for (const auto& e : derived_edges(h, level, co)) out.emplace(e.before, e.after);
  return out;
}

SatisfactionResult satisfies(const History& h, const IsolationLevel& level) {
  HistoryIndex idx(h);
  return level.co_dependent ? satisfies_co_dependent(h, idx, level) : satisfies_co_free(idx, level);
}

bool satisfies_with_order(const History& h, const CommitOrder& co, const IsolationLevel& level) {
  HistoryIndex idx(h);
  return order_satisfies(idx, idx.commit_order(co), level);
}

std::vector<ReadSource> valid_read_sources(const History& h, TxnId reader, const Key& key,
                                           const IsolationLevel& level, const CommitOrder& exec_order) {
  std::vector<ReadSource> out;
  CommitOrder co = exec_order;
  if (level.co_dependent && std::find(co.order.begin(), co.order.end(), reader) == co.order.end()) {
    co.order.push_back(reader);
  }
  for (const auto& log : h.transactions()) {
    if (log.id == reader || !log.committed || !h.writes_key(log.id, key)) continue;
    PendingRead pending{reader, key, log.id};
    HistoryIndex idx(h, &pending);
    bool ok = false;
    if (level.co_dependent) {
      ok = order_satisfies(idx, idx.commit_order(co), level);
    } else {
      ok = satisfies_co_free(idx, level).satisfied;
    }
    if (ok) out.push_back({log.id, *h.final_write_value(log.id, key)});
  }
  std::sort(out.begin(), out.end(), [](const ReadSource& a, const ReadSource& b) { return a.txn < b.txn; });
  return out;
}

bool brute_force_satisfies(const History& h, const IsolationLevel& level, std::size_t cap) {
  if (h.size() - 1 > cap) {
    throw Error(ErrorCode::kTooLarge, std::to_string(h.size() - 1) + " transactions exceed the cap of " +
                                          std::to_string(cap));
  }
  HistoryIndex idx(h);
  const BitRelation base = base_order(idx);
  const std::size_t n = idx.txn_count();
  std::vector<std::size_t> order;
  std::vector<bool> used(n, false);
  // Depth-first enumeration of every linear extension of wr ∪ so.
  std::function<bool()> enumerate = [&]() -> bool {
    if (order.size() == n) {
      BitRelation co(idx.node_count());
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) co.set(order[i], order[j]);
      }
      return order_satisfies(idx, co, level);
    }
    for (std::size_t t = 0; t < n; ++t) {
      if (used[t]) continue;
      bool ready = true;
      for (std::size_t p = 0; p < n && ready; ++p) ready = used[p] || !base.test(p, t);
      if (!ready) continue;
      used[t] = true;
      order.push_back(t);
      if (enumerate()) return true;
      order.pop_back();
      used[t] = false;
    }
    return false;
  };
  return enumerate();
}

}  // namespace weakstore
