#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "weakstore/store.hpp"
#include "weakstore/value.hpp"

namespace weakstore {

struct TableSchema {
  std::string name;
  std::vector<std::string> columns;  // columns.front() is the primary key

  const std::string& primary_key() const { return columns.front(); }
  bool has_column(const std::string& c) const;
};

class Schema {
 public:
  // Throws Error(kSyntaxError) on an existing table or duplicate columns.
  void add_table(TableSchema table);
  const TableSchema* find(const std::string& name) const;
  // Throws Error(kUnknownTable).
  const TableSchema& table(const std::string& name) const;
  const std::map<std::string, TableSchema>& tables() const noexcept { return tables_; }

 private:
  std::map<std::string, TableSchema> tables_;
};

enum class CmpOp { kEq, kNe, kLt, kLe, kGt, kGe };

struct Operand {
  std::optional<std::string> column;  // otherwise a constant
  Value constant;
};

struct Predicate {
  enum class Kind { kCompare, kAnd, kOr, kNot };

  Kind kind = Kind::kCompare;
  CmpOp op = CmpOp::kEq;
  Operand lhs;
  Operand rhs;
  std::vector<Predicate> children;

  // Referenced columns in order of first appearance.
  std::vector<std::string> columns() const;
};

using Row = std::map<std::string, Value>;
using RowSet = std::vector<Row>;

// Comparisons involving null are false; comparing values of different
// types throws Error(kTypeError).
bool evaluate(const Predicate& p, const Row& row);

struct SelectStmt {
  std::string table;
  std::vector<std::string> columns;  // `*` expands to the schema order
  std::optional<Predicate> where;
};
struct InsertStmt {
  std::string table;
  std::vector<Value> values;
};
struct DeleteStmt {
  std::string table;
  std::optional<Predicate> where;
};
struct UpdateStmt {
  std::string table;
  std::vector<std::pair<std::string, Value>> assignments;
  std::optional<Predicate> where;
};
struct CreateTableStmt {
  TableSchema table;
};
struct BeginStmt {};
struct CommitStmt {};

using SqlStatement =
    std::variant<SelectStmt, InsertStmt, DeleteStmt, UpdateStmt, CreateTableStmt, BeginStmt, CommitStmt>;

// Parses one statement; a trailing `;` is optional. Keywords are
// case-insensitive, identifiers are not. Throws Error(kSyntaxError) with
// the offset and the expected tokens, Error(kUnknownTable) or
// Error(kUnknownColumn).
SqlStatement parse_sql(const std::string& text, const Schema& schema);

// Splits a script into statements at top-level `;`.
std::vector<std::string> split_sql(const std::string& text);

// Store keys of a cell and of a row-presence flag. Components are escaped
// so the encoding is injective.
Key encode_cell_key(const std::string& table, const Value& pk, const std::string& column);
Key encode_has_key(const std::string& table, const Value& pk);

struct SqlResult {
  std::optional<RowSet> rows;  // set for SELECT
  std::size_t affected = 0;
};

// Compiles statements to reads and writes on a Store. Rows are modelled by
// one key per cell plus a presence flag per primary key. Each table keeps
// a grow-only registry of every primary key ever inserted, scanned in
// ascending order of its encoding.
class SqlEngine {
 public:
  explicit SqlEngine(Store& store);

  // Runs one statement. Outside BEGIN ... COMMIT the statement runs in its
  // own transaction.
  SqlResult execute(SessionId s, const SqlStatement& stmt);
  // Parses and runs every statement of a script, returning the last result.
  SqlResult execute(SessionId s, const std::string& script);

  // Presence-flag primitives; require a live transaction.
  bool set_add(SessionId s, const std::string& table, const Value& pk);
  bool set_remove(SessionId s, const std::string& table, const Value& pk);
  std::vector<Value> set_elements(SessionId s, const std::string& table);

  Schema schema() const;

  // Bound on waiting for another session's commit in BEGIN and implicit
  // transactions; unset waits forever.
  void set_begin_timeout(std::optional<std::chrono::milliseconds> timeout) { begin_timeout_ = timeout; }

 private:
  struct Match {
    Value pk;
    Row cells;
  };

  SqlResult run(SessionId s, const SqlStatement& stmt);
  std::vector<Value> registered(const std::string& table) const;
  // Rows present and satisfying `where`, with the cells read so far.
  std::vector<Match> scan(SessionId s, const TableSchema& t, const std::optional<Predicate>& where);
  Value read_cell(SessionId s, const TableSchema& t, Match& m, const std::string& column);

  Store& store_;
  mutable std::mutex mu_;
  Schema schema_;
  std::map<std::string, std::map<std::string, Value>> registry_;
  std::optional<std::chrono::milliseconds> begin_timeout_;
};

}  // namespace weakstore
