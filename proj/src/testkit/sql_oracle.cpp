#include "weakstore/testkit/sql_oracle.hpp"

#include "weakstore/errors.hpp"
#include "weakstore/store.hpp"

namespace weakstore::testkit {

SqlResult NaiveTables::execute(const SqlStatement& stmt) {
  SqlResult r;
  if (const auto* c = std::get_if<CreateTableStmt>(&stmt)) {
    schema_.add_table(c->table);
    rows_[c->table.name];
    return r;
  }
  if (const auto* ins = std::get_if<InsertStmt>(&stmt)) {
    const TableSchema& t = schema_.table(ins->table);
    const Key id = encode_has_key(t.name, ins->values.front());
    auto& rows = rows_[t.name];
    if (rows.count(id)) throw Error(ErrorCode::kDuplicateKey, "duplicate key");
    Row row;
    for (std::size_t i = 0; i < t.columns.size(); ++i) row[t.columns[i]] = ins->values[i];
    rows.emplace(id, std::move(row));
    r.affected = 1;
    return r;
  }
  if (const auto* sel = std::get_if<SelectStmt>(&stmt)) {
    RowSet out;
    for (const auto& [_, row] : rows_[sel->table]) {
      if (sel->where && !evaluate(*sel->where, row)) continue;
      Row projected;
      for (const auto& c : sel->columns) projected[c] = row.at(c);
      out.push_back(std::move(projected));
    }
    r.rows = std::move(out);
    return r;
  }
  if (const auto* del = std::get_if<DeleteStmt>(&stmt)) {
    auto& rows = rows_[del->table];
    for (auto it = rows.begin(); it != rows.end();) {
      if (!del->where || evaluate(*del->where, it->second)) {
        it = rows.erase(it);
        ++r.affected;
      } else {
        ++it;
      }
    }
    return r;
  }
  if (const auto* upd = std::get_if<UpdateStmt>(&stmt)) {
    for (auto& [_, row] : rows_[upd->table]) {
      if (upd->where && !evaluate(*upd->where, row)) continue;
      for (const auto& [c, v] : upd->assignments) row[c] = v;
      ++r.affected;
    }
    return r;
  }
  return r;
}

std::vector<std::string> sql_fixture_tables() {
  return {"CREATE TABLE A (Id, Name, City)", "CREATE TABLE B (Id, Owner, Score)"};
}

namespace {

struct Column {
  std::string name;
  bool text;
};

const std::vector<std::pair<std::string, std::vector<Column>>>& fixture_columns() {
  static const std::vector<std::pair<std::string, std::vector<Column>>> tables = {
      {"A", {{"Id", false}, {"Name", true}, {"City", true}}},
      {"B", {{"Id", false}, {"Owner", false}, {"Score", false}}}};
  return tables;
}

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::string literal(std::mt19937_64& rng, const Column& c) {
  static const char* names[] = {"Alice", "Bob", "Charles", "Paris", "Oslo", "O'Hara"};
  if (pick(rng, 0, 15) == 0) return "NULL";
  if (c.text) {
    std::string s = names[pick(rng, 0, 5)];
    std::string out = "'";
    for (char ch : s) {
      out += ch;
      if (ch == '\'') out += '\'';
    }
    return out + "'";
  }
  return std::to_string(static_cast<long long>(pick(rng, 0, 6)) - 1);
}

std::string predicate(std::mt19937_64& rng, const std::vector<Column>& cols, int depth) {
  static const char* ops[] = {"=", "<>", "!=", "<", "<=", ">", ">="};
  const std::size_t form = depth > 0 ? pick(rng, 0, 5) : 0;
  if (form == 3) return "(" + predicate(rng, cols, depth - 1) + " AND " + predicate(rng, cols, depth - 1) + ")";
  if (form == 4) return predicate(rng, cols, depth - 1) + " OR " + predicate(rng, cols, depth - 1);
  if (form == 5) return "NOT " + predicate(rng, cols, depth - 1);
  const Column& c = cols[pick(rng, 0, cols.size() - 1)];
  std::string rhs = literal(rng, c);
  // Column-to-column comparisons stay within one type.
  if (pick(rng, 0, 4) == 0) {
    for (const auto& other : cols) {
      if (other.text == c.text && other.name != c.name) rhs = other.name;
    }
  }
  return c.name + " " + ops[pick(rng, 0, 6)] + " " + rhs;
}

}  // namespace

std::vector<std::string> random_sql_sequence(std::mt19937_64& rng, std::size_t length) {
  std::vector<std::string> out;
  for (std::size_t n = 0; n < length; ++n) {
    const auto& [table, cols] = fixture_columns()[pick(rng, 0, 1)];
    const std::size_t kind = pick(rng, 0, 9);
    std::string where = pick(rng, 0, 3) == 0 ? "" : " WHERE " + predicate(rng, cols, 2);
    if (kind < 4) {
      std::string s = "INSERT INTO " + table + " VALUES (" + std::to_string(pick(rng, 1, 6));
      for (std::size_t i = 1; i < cols.size(); ++i) s += ", " + literal(rng, cols[i]);
      out.push_back(s + ")");
    } else if (kind < 7) {
      std::string s = "SELECT ";
      if (pick(rng, 0, 3) == 0) {
        s += "*";
      } else {
        std::vector<std::string> chosen;
        for (const auto& c : cols) {
          if (pick(rng, 0, 1) == 0) chosen.push_back(c.name);
        }
        if (chosen.empty()) chosen.push_back(cols[pick(rng, 0, cols.size() - 1)].name);
        for (std::size_t i = 0; i < chosen.size(); ++i) s += (i ? ", " : "") + chosen[i];
      }
      out.push_back(s + " FROM " + table + where);
    } else if (kind < 9) {
      const Column& c = cols[pick(rng, 1, cols.size() - 1)];
      out.push_back("UPDATE " + table + " SET " + c.name + " = " + literal(rng, c) + where);
    } else {
      out.push_back("DELETE FROM " + table + where);
    }
  }
  return out;
}

namespace {

std::string describe(const SqlResult& r) {
  if (!r.rows) return "affected " + std::to_string(r.affected);
  std::string out = "[";
  for (const auto& row : *r.rows) {
    out += "{";
    for (const auto& [c, v] : row) out += c + ":" + v.to_string() + ",";
    out += "}";
  }
  return out + "]";
}

template <typename F>
std::string outcome(F&& f) {
  try {
    return describe(f());
  } catch (const Error& e) {
    return "error " + std::string(error_code_name(e.code()));
  }
}

}  // namespace

std::optional<std::string> compare_with_oracle(const std::vector<std::string>& statements,
                                               const IsolationLevel& level, std::uint64_t seed, TxnMode mode) {
  StoreConfig cfg;
  cfg.level = level;
  cfg.seed = seed;
  Store store(cfg);
  SqlEngine engine(store);
  NaiveTables oracle;
  const SessionId s = store.open_session();
  for (const auto& ddl : sql_fixture_tables()) {
    engine.execute(s, ddl);
    oracle.execute(parse_sql(ddl, oracle.schema()));
  }
  if (mode == TxnMode::kSingleTransaction) store.begin(s);
  for (std::size_t i = 0; i < statements.size(); ++i) {
    const auto& text = statements[i];
    const std::string got = outcome([&] { return engine.execute(s, parse_sql(text, engine.schema())); });
    const std::string want = outcome([&] { return oracle.execute(parse_sql(text, oracle.schema())); });
    if (got != want) return "statement " + std::to_string(i) + " `" + text + "`: got " + got + ", expected " + want;
  }
  if (mode == TxnMode::kSingleTransaction) store.commit(s);
  return std::nullopt;
}

}  // namespace weakstore::testkit
