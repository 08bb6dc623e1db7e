#pragma once

#include <cstdint>
#include <string>
#include <type_traits>

namespace weakstore {

// Identifiers are dense per-history counters. Distinct enum types keep
// transaction, operation and session ids from being mixed up.
enum class TxnId : std::uint32_t {};
enum class OpId : std::uint32_t {};
enum class SessionId : std::uint32_t {};

template <typename Id>
constexpr auto raw(Id id) noexcept {
  return static_cast<std::underlying_type_t<Id>>(id);
}

inline std::string to_string(TxnId id) { return "t" + std::to_string(raw(id)); }
inline std::string to_string(OpId id) { return "o" + std::to_string(raw(id)); }
inline std::string to_string(SessionId id) { return "s" + std::to_string(raw(id)); }

}  // namespace weakstore
