#pragma once

#include <cmath>
#include <concepts>
#include <map>
#include <string>
#include <string_view>
#include <variant>

#include "contextdb/core/error.hpp"

namespace contextdb {

/// Typed metadata value: number, string or boolean. Values of different
/// types never compare equal and are never coerced into each other.
class MetaValue {
 public:
  enum class Type { number, string, boolean };

  MetaValue() : value_(0.0) {}
  template <std::floating_point T>
  MetaValue(T v) : value_(static_cast<double>(v)) {  // NOLINT(google-explicit-constructor)
    if (!std::isfinite(v)) throw InvalidArgumentError("metadata numbers must be finite");
  }
  template <std::integral T>
    requires(!std::same_as<T, bool>)
  MetaValue(T v) : value_(static_cast<double>(v)) {}  // NOLINT(google-explicit-constructor)
  MetaValue(bool v) : value_(v) {}                     // NOLINT(google-explicit-constructor)
  MetaValue(std::string v) : value_(std::move(v)) {}   // NOLINT(google-explicit-constructor)
  MetaValue(std::string_view v) : value_(std::string(v)) {}  // NOLINT
  MetaValue(const char* v) : value_(std::string(v)) {}       // NOLINT

  Type type() const noexcept { return static_cast<Type>(value_.index()); }
  bool is_number() const noexcept { return type() == Type::number; }
  bool is_string() const noexcept { return type() == Type::string; }
  bool is_bool() const noexcept { return type() == Type::boolean; }

  double as_number() const { return std::get<double>(value_); }
  const std::string& as_string() const { return std::get<std::string>(value_); }
  bool as_bool() const { return std::get<bool>(value_); }

  /// Human-facing rendering: integral numbers print without a fraction,
  /// other numbers in shortest round-trip form, strings verbatim.
  std::string to_display() const;

  friend bool operator==(const MetaValue&, const MetaValue&) = default;
  /// Orders by type first, then by value. Used for index keys only.
  friend bool operator<(const MetaValue& a, const MetaValue& b) { return a.value_ < b.value_; }

 private:
  std::variant<double, std::string, bool> value_;
};

std::string_view type_name(MetaValue::Type type) noexcept;

using Metadata = std::map<std::string, MetaValue, std::less<>>;

}  // namespace contextdb
