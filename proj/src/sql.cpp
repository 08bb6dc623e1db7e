#include "weakstore/sql.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "weakstore/errors.hpp"

namespace weakstore {

bool TableSchema::has_column(const std::string& c) const {
  return std::find(columns.begin(), columns.end(), c) != columns.end();
}

void Schema::add_table(TableSchema table) {
  if (table.columns.empty()) throw Error(ErrorCode::kSyntaxError, "table " + table.name + " has no columns");
  std::set<std::string> seen;
  for (const auto& c : table.columns) {
    if (!seen.insert(c).second) throw Error(ErrorCode::kSyntaxError, "duplicate column " + c + " in " + table.name);
  }
  if (tables_.count(table.name)) throw Error(ErrorCode::kSyntaxError, "table " + table.name + " already exists");
  std::string name = table.name;
  tables_.emplace(std::move(name), std::move(table));
}

const TableSchema* Schema::find(const std::string& name) const {
  auto it = tables_.find(name);
  return it == tables_.end() ? nullptr : &it->second;
}

const TableSchema& Schema::table(const std::string& name) const {
  const TableSchema* t = find(name);
  if (!t) throw Error(ErrorCode::kUnknownTable, "unknown table " + name);
  return *t;
}

std::vector<std::string> Predicate::columns() const {
  std::vector<std::string> out;
  auto add = [&out](const std::string& c) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  };
  if (kind == Kind::kCompare) {
    if (lhs.column) add(*lhs.column);
    if (rhs.column) add(*rhs.column);
  }
  for (const auto& child : children) {
    for (const auto& c : child.columns()) add(c);
  }
  return out;
}

namespace {

const Value& operand_value(const Operand& o, const Row& row) {
  if (!o.column) return o.constant;
  auto it = row.find(*o.column);
  if (it == row.end()) throw Error(ErrorCode::kUnknownColumn, "column " + *o.column + " not available");
  return it->second;
}

bool compare(CmpOp op, const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return false;
  if (a.index() != b.index()) {
    throw Error(ErrorCode::kTypeError, "cannot compare " + a.to_string() + " with " + b.to_string());
  }
  switch (op) {
    case CmpOp::kEq: return a == b;
    case CmpOp::kNe: return a != b;
    case CmpOp::kLt: return a < b;
    case CmpOp::kLe: return a <= b;
    case CmpOp::kGt: return a > b;
    case CmpOp::kGe: return a >= b;
  }
  return false;
}

}  // namespace

bool evaluate(const Predicate& p, const Row& row) {
  switch (p.kind) {
    case Predicate::Kind::kCompare:
      return compare(p.op, operand_value(p.lhs, row), operand_value(p.rhs, row));
    case Predicate::Kind::kAnd:
      return std::all_of(p.children.begin(), p.children.end(), [&](const Predicate& c) { return evaluate(c, row); });
    case Predicate::Kind::kOr:
      return std::any_of(p.children.begin(), p.children.end(), [&](const Predicate& c) { return evaluate(c, row); });
    case Predicate::Kind::kNot:
      return !evaluate(p.children.front(), row);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Lexer and parser

namespace {

struct Token {
  enum class Kind { kIdent, kInt, kString, kSymbol, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;
  std::size_t offset = 0;
  std::int64_t number = 0;
};

[[noreturn]] void syntax_error(std::size_t offset, const std::string& msg) {
  throw Error(ErrorCode::kSyntaxError, "at offset " + std::to_string(offset) + ": " + msg);
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '-' && i + 1 < n && text[i + 1] == '-') {
      while (i < n && text[i] != '\n') ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i;
      while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
      out.push_back({Token::Kind::kIdent, text.substr(start, i - start), start, 0});
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = i;
      while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      Token t{Token::Kind::kInt, text.substr(start, i - start), start, 0};
      try {
        t.number = std::stoll(t.text);
      } catch (const std::out_of_range&) {
        syntax_error(start, "integer literal out of range");
      }
      out.push_back(std::move(t));
    } else if (c == '\'') {
      std::size_t start = i++;
      std::string s;
      for (;;) {
        if (i >= n) syntax_error(start, "unterminated string literal");
        if (text[i] == '\'') {
          if (i + 1 < n && text[i + 1] == '\'') {
            s += '\'';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        s += text[i++];
      }
      out.push_back({Token::Kind::kString, std::move(s), start, 0});
    } else {
      static const char* two[] = {"<=", ">=", "<>", "!="};
      std::string sym(1, c);
      for (const char* t : two) {
        if (text.compare(i, 2, t) == 0) sym = t;
      }
      if (sym.size() == 1 && std::string("(),;*=<>-.").find(c) == std::string::npos) {
        syntax_error(i, std::string("unexpected character '") + c + "'");
      }
      out.push_back({Token::Kind::kSymbol, sym, i, 0});
      i += sym.size();
    }
  }
  out.push_back({Token::Kind::kEnd, "", n, 0});
  return out;
}

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {"SELECT", "FROM",  "WHERE", "INSERT", "INTO",  "VALUES", "DELETE",
                                          "UPDATE", "SET",   "CREATE", "TABLE", "BEGIN", "COMMIT", "AND",
                                          "OR",     "NOT",   "NULL",  "TRUE",   "FALSE", "JOIN",   "INNER",
                                          "LEFT",   "RIGHT", "OUTER", "CROSS",  "ON"};
  return k;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const Schema& schema) : toks_(std::move(tokens)), schema_(schema) {}

  SqlStatement statement() {
    SqlStatement out;
    if (accept_kw("SELECT")) {
      out = select();
    } else if (accept_kw("INSERT")) {
      out = insert();
    } else if (accept_kw("DELETE")) {
      out = remove();
    } else if (accept_kw("UPDATE")) {
      out = update();
    } else if (accept_kw("CREATE")) {
      out = create();
    } else if (accept_kw("BEGIN")) {
      out = BeginStmt{};
    } else if (accept_kw("COMMIT")) {
      out = CommitStmt{};
    } else {
      fail("SELECT, INSERT, DELETE, UPDATE, CREATE, BEGIN or COMMIT");
    }
    accept_sym(";");
    if (peek().kind != Token::Kind::kEnd) fail("end of statement");
    return out;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }

  bool is_kw(const Token& t, const char* kw) const { return t.kind == Token::Kind::kIdent && upper(t.text) == kw; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    std::string found = t.kind == Token::Kind::kEnd ? "end of input" : "'" + t.text + "'";
    syntax_error(t.offset, "expected " + expected + ", found " + found);
  }

  bool accept_kw(const char* kw) {
    if (!is_kw(peek(), kw)) return false;
    ++pos_;
    return true;
  }
  void expect_kw(const char* kw) {
    if (!accept_kw(kw)) fail(kw);
  }
  bool accept_sym(const char* sym) {
    if (peek().kind != Token::Kind::kSymbol || peek().text != sym) return false;
    ++pos_;
    return true;
  }
  void expect_sym(const char* sym) {
    if (!accept_sym(sym)) fail(std::string("'") + sym + "'");
  }

  std::string identifier(const char* what) {
    const Token& t = peek();
    if (t.kind != Token::Kind::kIdent || keywords().count(upper(t.text))) fail(what);
    ++pos_;
    return t.text;
  }

  const TableSchema& table_ref() {
    std::string name = identifier("table name");
    const TableSchema& t = schema_.table(name);
    if (is_kw(peek(), "JOIN") || is_kw(peek(), "INNER") || is_kw(peek(), "LEFT") || is_kw(peek(), "RIGHT") ||
        is_kw(peek(), "CROSS") || is_kw(peek(), "OUTER") || (peek().kind == Token::Kind::kSymbol && peek().text == ",")) {
      syntax_error(peek().offset, "unsupported: JOIN");
    }
    return t;
  }

  std::string column_of(const TableSchema& t) {
    std::size_t at = peek().offset;
    std::string c = identifier("column name");
    if (!t.has_column(c)) throw Error(ErrorCode::kUnknownColumn, "unknown column " + c + " in " + t.name + " at offset " + std::to_string(at));
    return c;
  }

  std::optional<Value> literal() {
    const Token& t = peek();
    if (t.kind == Token::Kind::kInt) {
      ++pos_;
      return Value(t.number);
    }
    if (t.kind == Token::Kind::kString) {
      ++pos_;
      return Value(t.text);
    }
    if (t.kind == Token::Kind::kSymbol && t.text == "-" && toks_[pos_ + 1].kind == Token::Kind::kInt) {
      pos_ += 2;
      return Value(-toks_[pos_ - 1].number);
    }
    if (accept_kw("NULL")) return Value();
    if (accept_kw("TRUE")) return Value(true);
    if (accept_kw("FALSE")) return Value(false);
    return std::nullopt;
  }

  Value expect_literal() {
    if (peek().kind == Token::Kind::kSymbol && peek().text == "(" && is_kw(toks_[pos_ + 1], "SELECT")) {
      syntax_error(peek().offset, "unsupported: nested query");
    }
    auto v = literal();
    if (!v) fail("literal");
    return *v;
  }

  SelectStmt select() {
    SelectStmt s;
    std::vector<std::pair<std::string, std::size_t>> cols;
    bool star = accept_sym("*");
    if (!star) {
      do {
        cols.emplace_back(identifier("column name or '*'"), toks_[pos_ - 1].offset);
      } while (accept_sym(","));
    }
    expect_kw("FROM");
    if (peek().kind == Token::Kind::kSymbol && peek().text == "(") syntax_error(peek().offset, "unsupported: nested query");
    const TableSchema& t = table_ref();
    s.table = t.name;
    if (star) {
      s.columns = t.columns;
    } else {
      for (auto& [c, at] : cols) {
        if (!t.has_column(c)) throw Error(ErrorCode::kUnknownColumn, "unknown column " + c + " in " + t.name + " at offset " + std::to_string(at));
        s.columns.push_back(c);
      }
    }
    s.where = where(t);
    return s;
  }

  InsertStmt insert() {
    expect_kw("INTO");
    const TableSchema& t = table_ref();
    expect_kw("VALUES");
    expect_sym("(");
    InsertStmt s{t.name, {}};
    do {
      s.values.push_back(expect_literal());
    } while (accept_sym(","));
    expect_sym(")");
    if (s.values.size() != t.columns.size()) {
      syntax_error(peek().offset, "expected " + std::to_string(t.columns.size()) + " values for " + t.name + ", got " +
                                      std::to_string(s.values.size()));
    }
    return s;
  }

  DeleteStmt remove() {
    expect_kw("FROM");
    const TableSchema& t = table_ref();
    return {t.name, where(t)};
  }

  UpdateStmt update() {
    const TableSchema& t = table_ref();
    expect_kw("SET");
    UpdateStmt s{t.name, {}, std::nullopt};
    do {
      std::size_t at = peek().offset;
      std::string c = column_of(t);
      if (c == t.primary_key()) syntax_error(at, "unsupported: updating primary key " + c);
      expect_sym("=");
      s.assignments.emplace_back(c, expect_literal());
    } while (accept_sym(","));
    s.where = where(t);
    return s;
  }

  CreateTableStmt create() {
    expect_kw("TABLE");
    CreateTableStmt s;
    s.table.name = identifier("table name");
    expect_sym("(");
    do {
      s.table.columns.push_back(identifier("column name"));
    } while (accept_sym(","));
    expect_sym(")");
    return s;
  }

  std::optional<Predicate> where(const TableSchema& t) {
    if (!accept_kw("WHERE")) return std::nullopt;
    return disjunction(t);
  }

  Predicate disjunction(const TableSchema& t) {
    Predicate first = conjunction(t);
    if (!is_kw(peek(), "OR")) return first;
    Predicate p{Predicate::Kind::kOr, CmpOp::kEq, {}, {}, {std::move(first)}};
    while (accept_kw("OR")) p.children.push_back(conjunction(t));
    return p;
  }

  Predicate conjunction(const TableSchema& t) {
    Predicate first = unary(t);
    if (!is_kw(peek(), "AND")) return first;
    Predicate p{Predicate::Kind::kAnd, CmpOp::kEq, {}, {}, {std::move(first)}};
    while (accept_kw("AND")) p.children.push_back(unary(t));
    return p;
  }

  Predicate unary(const TableSchema& t) {
    if (accept_kw("NOT")) return {Predicate::Kind::kNot, CmpOp::kEq, {}, {}, {unary(t)}};
    if (peek().kind == Token::Kind::kSymbol && peek().text == "(") {
      if (is_kw(toks_[pos_ + 1], "SELECT")) syntax_error(peek().offset, "unsupported: nested query");
      ++pos_;
      Predicate p = disjunction(t);
      expect_sym(")");
      return p;
    }
    Predicate p;
    p.lhs = operand(t);
    p.op = comparison();
    p.rhs = operand(t);
    return p;
  }

  Operand operand(const TableSchema& t) {
    if (auto v = literal()) return {std::nullopt, *v};
    if (peek().kind == Token::Kind::kSymbol && peek().text == "(" && is_kw(toks_[pos_ + 1], "SELECT")) {
      syntax_error(peek().offset, "unsupported: nested query");
    }
    if (peek().kind != Token::Kind::kIdent) fail("column name or literal");
    return {column_of(t), Value()};
  }

  CmpOp comparison() {
    const Token& t = peek();
    if (t.kind == Token::Kind::kSymbol) {
      static const std::map<std::string, CmpOp> ops = {{"=", CmpOp::kEq},  {"!=", CmpOp::kNe}, {"<>", CmpOp::kNe},
                                                       {"<", CmpOp::kLt},  {"<=", CmpOp::kLe}, {">", CmpOp::kGt},
                                                       {">=", CmpOp::kGe}};
      auto it = ops.find(t.text);
      if (it != ops.end()) {
        ++pos_;
        return it->second;
      }
    }
    fail("comparison operator");
  }

  std::vector<Token> toks_;
  const Schema& schema_;
  std::size_t pos_ = 0;
};

std::string escape_component(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == ':' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string encode_pk(const Value& pk) { return escape_component(pk.to_string()); }

}  // namespace

SqlStatement parse_sql(const std::string& text, const Schema& schema) {
  return Parser(tokenize(text), schema).statement();
}

std::vector<std::string> split_sql(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (const Token& t : tokenize(text)) {
    const bool end = t.kind == Token::Kind::kEnd;
    if (end || (t.kind == Token::Kind::kSymbol && t.text == ";")) {
      std::string stmt = text.substr(start, t.offset - start);
      if (stmt.find_first_not_of(" \t\r\n") != std::string::npos) out.push_back(std::move(stmt));
      start = t.offset + 1;
    }
  }
  return out;
}

Key encode_cell_key(const std::string& table, const Value& pk, const std::string& column) {
  return "t:" + escape_component(table) + ":r:" + encode_pk(pk) + ":c:" + escape_component(column);
}

Key encode_has_key(const std::string& table, const Value& pk) {
  return "t:" + escape_component(table) + ":has:" + encode_pk(pk);
}

// ---------------------------------------------------------------------------
// Engine

SqlEngine::SqlEngine(Store& store) : store_(store) {}

Schema SqlEngine::schema() const {
  std::lock_guard lock(mu_);
  return schema_;
}

std::vector<Value> SqlEngine::registered(const std::string& table) const {
  std::lock_guard lock(mu_);
  std::vector<Value> out;
  auto it = registry_.find(table);
  if (it == registry_.end()) return out;
  for (const auto& [_, pk] : it->second) out.push_back(pk);
  return out;
}

bool SqlEngine::set_add(SessionId s, const std::string& table, const Value& pk) {
  const Key has = encode_has_key(table, pk);
  if (store_.read(s, has) == Value(true)) return false;
  {
    std::lock_guard lock(mu_);
    registry_[table].emplace(encode_pk(pk), pk);
  }
  store_.write(s, has, Value(true));
  return true;
}

bool SqlEngine::set_remove(SessionId s, const std::string& table, const Value& pk) {
  const Key has = encode_has_key(table, pk);
  if (store_.read(s, has) != Value(true)) return false;
  store_.write(s, has, Value(false));
  return true;
}

std::vector<Value> SqlEngine::set_elements(SessionId s, const std::string& table) {
  std::vector<Value> out;
  for (const Value& pk : registered(table)) {
    if (store_.read(s, encode_has_key(table, pk)) == Value(true)) out.push_back(pk);
  }
  return out;
}

Value SqlEngine::read_cell(SessionId s, const TableSchema& t, Match& m, const std::string& column) {
  auto it = m.cells.find(column);
  if (it != m.cells.end()) return it->second;
  Value v = store_.read(s, encode_cell_key(t.name, m.pk, column));
  m.cells.emplace(column, v);
  return v;
}

std::vector<SqlEngine::Match> SqlEngine::scan(SessionId s, const TableSchema& t, const std::optional<Predicate>& where) {
  std::vector<Match> out;
  const std::vector<std::string> needed = where ? where->columns() : std::vector<std::string>{};
  for (const Value& pk : set_elements(s, t.name)) {
    Match m{pk, {}};
    for (const auto& c : needed) read_cell(s, t, m, c);
    if (!where || evaluate(*where, m.cells)) out.push_back(std::move(m));
  }
  return out;
}

SqlResult SqlEngine::run(SessionId s, const SqlStatement& stmt) {
  SqlResult result;
  if (const auto* sel = std::get_if<SelectStmt>(&stmt)) {
    const TableSchema t = schema().table(sel->table);
    RowSet rows;
    for (Match& m : scan(s, t, sel->where)) {
      Row row;
      for (const auto& c : sel->columns) row[c] = read_cell(s, t, m, c);
      rows.push_back(std::move(row));
    }
    result.rows = std::move(rows);
  } else if (const auto* ins = std::get_if<InsertStmt>(&stmt)) {
    const TableSchema t = schema().table(ins->table);
    if (ins->values.size() != t.columns.size()) {
      throw Error(ErrorCode::kSyntaxError, "expected " + std::to_string(t.columns.size()) + " values for " + t.name);
    }
    const Value& pk = ins->values.front();
    if (!set_add(s, t.name, pk)) {
      throw Error(ErrorCode::kDuplicateKey, "duplicate primary key " + pk.to_string() + " in " + t.name);
    }
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      store_.write(s, encode_cell_key(t.name, pk, t.columns[i]), ins->values[i]);
    }
    result.affected = 1;
  } else if (const auto* del = std::get_if<DeleteStmt>(&stmt)) {
    const TableSchema t = schema().table(del->table);
    for (const Match& m : scan(s, t, del->where)) {
      if (set_remove(s, t.name, m.pk)) ++result.affected;
    }
  } else if (const auto* upd = std::get_if<UpdateStmt>(&stmt)) {
    const TableSchema t = schema().table(upd->table);
    for (const Match& m : scan(s, t, upd->where)) {
      for (const auto& [c, v] : upd->assignments) store_.write(s, encode_cell_key(t.name, m.pk, c), v);
      ++result.affected;
    }
  }
  return result;
}

SqlResult SqlEngine::execute(SessionId s, const SqlStatement& stmt) {
  if (const auto* create = std::get_if<CreateTableStmt>(&stmt)) {
    std::lock_guard lock(mu_);
    schema_.add_table(create->table);
    return {};
  }
  if (std::holds_alternative<BeginStmt>(stmt)) {
    store_.begin(s, begin_timeout_);
    return {};
  }
  if (std::holds_alternative<CommitStmt>(stmt)) {
    store_.commit(s);
    return {};
  }
  if (store_.live_txn(s)) return run(s, stmt);
  store_.begin(s, begin_timeout_);
  try {
    SqlResult r = run(s, stmt);
    store_.commit(s);
    return r;
  } catch (...) {
    // No aborts: whatever ran before the error stays committed.
    store_.commit(s);
    throw;
  }
}

SqlResult SqlEngine::execute(SessionId s, const std::string& script) {
  SqlResult last;
  for (const auto& text : split_sql(script)) last = execute(s, parse_sql(text, schema()));
  return last;
}

}  // namespace weakstore
