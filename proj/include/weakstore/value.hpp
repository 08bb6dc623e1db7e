#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace weakstore {

// A stored or computed value: null, bool, integer, string, or a list of
// values. Lists model the tuples and multisets used by client programs
// (a cart, a follower list, a stack node). Values are totally ordered:
// first by alternative, then by content.
class Value {
 public:
  struct Null {
    friend constexpr bool operator==(Null, Null) noexcept { return true; }
    friend constexpr auto operator<=>(Null, Null) noexcept {
      return std::strong_ordering::equal;
    }
  };
  using List = std::vector<Value>;

  Value() = default;
  Value(Null) {}
  Value(bool b) : data_(b) {}
  Value(int v) : data_(static_cast<std::int64_t>(v)) {}
  Value(std::int64_t v) : data_(v) {}
  Value(std::string s) : data_(std::move(s)) {}
  Value(const char* s) : data_(std::string(s)) {}
  Value(List l) : data_(std::move(l)) {}

  bool is_null() const noexcept { return std::holds_alternative<Null>(data_); }
  bool is_bool() const noexcept { return std::holds_alternative<bool>(data_); }
  bool is_int() const noexcept { return std::holds_alternative<std::int64_t>(data_); }
  bool is_string() const noexcept { return std::holds_alternative<std::string>(data_); }
  bool is_list() const noexcept { return std::holds_alternative<List>(data_); }
  // Position of the held alternative: null, bool, int, string, list.
  std::size_t index() const noexcept { return data_.index(); }

  // Accessors throw Error(kTypeError) on the wrong alternative.
  bool as_bool() const;
  std::int64_t as_int() const;
  const std::string& as_string() const;
  const List& as_list() const;

  // Truthiness used by guards: only `true` is true.
  bool is_true() const noexcept { return is_bool() && std::get<bool>(data_); }

  std::size_t hash() const noexcept;

  // Compact human-readable form: null, true, 3, "s", [1,"a"].
  std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b);
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

 private:
  std::variant<Null, bool, std::int64_t, std::string, List> data_;
};

struct ValueHash {
  std::size_t operator()(const Value& v) const noexcept { return v.hash(); }
};

}  // namespace weakstore
