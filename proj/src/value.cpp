#include "weakstore/value.hpp"

#include <functional>

#include "weakstore/errors.hpp"

namespace weakstore {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

bool Value::as_bool() const {
  if (!is_bool()) throw Error(ErrorCode::kTypeError, "expected bool, got " + to_string());
  return std::get<bool>(data_);
}

std::int64_t Value::as_int() const {
  if (!is_int()) throw Error(ErrorCode::kTypeError, "expected integer, got " + to_string());
  return std::get<std::int64_t>(data_);
}

const std::string& Value::as_string() const {
  if (!is_string()) throw Error(ErrorCode::kTypeError, "expected string, got " + to_string());
  return std::get<std::string>(data_);
}

const Value::List& Value::as_list() const {
  if (!is_list()) throw Error(ErrorCode::kTypeError, "expected list, got " + to_string());
  return std::get<List>(data_);
}

std::size_t Value::hash() const noexcept {
  std::size_t seed = data_.index() * 0x9e3779b97f4a7c15ULL;
  auto mix = [&seed](std::size_t h) {
    seed ^= h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Null>) {
          mix(0);
        } else if constexpr (std::is_same_v<T, List>) {
          for (const auto& e : x) mix(e.hash());
          mix(x.size());
        } else {
          mix(std::hash<T>{}(x));
        }
      },
      data_);
  return seed;
}

std::string Value::to_string() const {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Null>) {
          return "null";
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return quote(x);
        } else {
          std::string out = "[";
          for (std::size_t i = 0; i < x.size(); ++i) {
            if (i) out += ",";
            out += x[i].to_string();
          }
          return out + "]";
        }
      },
      data_);
}

bool operator==(const Value& a, const Value& b) { return a.data_ == b.data_; }

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.data_.index() != b.data_.index()) return a.data_.index() <=> b.data_.index();
  return std::visit(
      [&b](const auto& x) -> std::strong_ordering {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.data_);
        if constexpr (std::is_same_v<T, Value::List>) {
          return std::lexicographical_compare_three_way(x.begin(), x.end(), y.begin(), y.end());
        } else if constexpr (std::is_same_v<T, std::string>) {
          int c = x.compare(y);
          return c < 0 ? std::strong_ordering::less
                       : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
        } else {
          return x <=> y;
        }
      },
      a.data_);
}

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kLiveTransactionExists: return "LiveTransactionExists";
    case ErrorCode::kTxnNotLive: return "TxnNotLive";
    case ErrorCode::kNoLiveTransaction: return "NoLiveTransaction";
    case ErrorCode::kInvalidSource: return "InvalidSource";
    case ErrorCode::kUnknownTransaction: return "UnknownTransaction";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kMalformedHistory: return "MalformedHistory";
    case ErrorCode::kMissingCommitOrder: return "MissingCommitOrder";
    case ErrorCode::kCoverageMismatch: return "CoverageMismatch";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kInternalNoCandidate: return "InternalNoCandidate";
    case ErrorCode::kLockTimeout: return "LockTimeout";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kUnknownTable: return "UnknownTable";
    case ErrorCode::kUnknownColumn: return "UnknownColumn";
    case ErrorCode::kDuplicateKey: return "DuplicateKey";
    case ErrorCode::kTypeError: return "TypeError";
    case ErrorCode::kProgramFormat: return "ProgramFormat";
    case ErrorCode::kEvalError: return "EvalError";
  }
  return "Unknown";
}

}  // namespace weakstore
