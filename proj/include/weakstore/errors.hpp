#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace weakstore {

enum class ErrorCode {
  kLiveTransactionExists,
  kTxnNotLive,
  kNoLiveTransaction,
  kInvalidSource,
  kUnknownTransaction,
  kUnknownSession,
  kMalformedHistory,
  kMissingCommitOrder,
  kCoverageMismatch,
  kTooLarge,
  kInternalNoCandidate,
  kLockTimeout,
  kBudgetExceeded,
  kSyntaxError,
  kUnknownTable,
  kUnknownColumn,
  kDuplicateKey,
  kTypeError,
  kProgramFormat,
  kEvalError,
};

std::string_view error_code_name(ErrorCode code) noexcept;

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace weakstore
