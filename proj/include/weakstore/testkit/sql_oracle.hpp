#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "weakstore/sql.hpp"

namespace weakstore::testkit {

// Plain in-memory tables with the same statement semantics as SqlEngine,
// rows kept in primary-key encoding order.
class NaiveTables {
 public:
  SqlResult execute(const SqlStatement& stmt);
  const Schema& schema() const noexcept { return schema_; }

 private:
  Schema schema_;
  std::map<std::string, std::map<Key, Row>> rows_;
};

// CREATE TABLE statements for the two generated tables.
std::vector<std::string> sql_fixture_tables();

// Random INSERT/SELECT/UPDATE/DELETE statements over the fixture tables,
// with small key ranges so duplicates and misses are common.
std::vector<std::string> random_sql_sequence(std::mt19937_64& rng, std::size_t length);

enum class TxnMode {
  kAutoCommit,         // every statement in its own transaction
  kSingleTransaction,  // the whole sequence inside BEGIN ... COMMIT
};

// Runs the fixture tables plus `statements` in one session of a fresh store
// and on NaiveTables. Returns a description of the first statement whose
// rows, affected count or error code differ, or nullopt.
std::optional<std::string> compare_with_oracle(const std::vector<std::string>& statements,
                                               const IsolationLevel& level, std::uint64_t seed, TxnMode mode);

}  // namespace weakstore::testkit
