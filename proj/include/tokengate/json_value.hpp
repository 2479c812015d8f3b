/*!
 * Copyright (c) 2026 by Contributors
 * \file tokengate/json_value.hpp
 * \brief JSON document model with decimal number semantics and
 *        insertion-order-preserving objects.
 */
#ifndef TOKENGATE_JSON_VALUE_HPP_
#define TOKENGATE_JSON_VALUE_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tokengate {

/*!
 * \brief Arbitrary-precision decimal: value = (-1)^negative * digits * 10^exponent.
 *
 * Always stored normalized: `digits` has no leading or trailing zeros
 * ("0" for zero), so two Decimals are numerically equal iff their fields
 * are equal (modulo the sign of zero).
 */
struct Decimal {
  bool negative = false;
  std::string digits = "0";
  int64_t exponent = 0;

  // Parses a JSON number lexeme. Throws std::invalid_argument on garbage.
  static Decimal from_lexeme(std::string_view text);
  static Decimal from_int(int64_t v);
  // Shortest round-trip rendering of v, then re-parsed as a decimal.
  static Decimal from_double(double v);

  bool is_zero() const { return digits == "0"; }
  // Normalization guarantees: fractional part nonzero iff exponent < 0.
  bool is_integer() const { return exponent >= 0 || is_zero(); }

  // Numeric three-way comparison; -0 compares equal to 0.
  int compare(const Decimal& other) const;
  bool operator==(const Decimal& other) const { return compare(other) == 0; }
  bool operator<(const Decimal& other) const { return compare(other) < 0; }

  // True iff *this / d is an exact integer. d must be nonzero.
  bool is_multiple_of(const Decimal& d) const;

  std::optional<int64_t> to_int64() const;

  // Canonical shortest rendering (valid JSON number lexeme).
  std::string to_string() const;
};

class JsonParseError : public std::runtime_error {
 public:
  JsonParseError(size_t offset, const std::string& message)
      : std::runtime_error(message + " at byte " + std::to_string(offset)), offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

/*!
 * \brief JSON value with full value semantics.
 *
 * Objects preserve insertion order and reject duplicate keys at parse time.
 * Numbers carry full decimal precision. operator== implements JSON Schema
 * equality: numeric comparison for numbers, key-order-insensitive objects.
 */
class JsonValue {
 public:
  enum class Kind { Null, Boolean, Number, String, Array, Object };

  struct Member;  // { std::string key; JsonValue value; }
  using Array = std::vector<JsonValue>;
  using Object = std::vector<Member>;

  JsonValue() : kind_(Kind::Null) {}
  JsonValue(const JsonValue& other);
  JsonValue(JsonValue&&) noexcept;
  JsonValue& operator=(const JsonValue& other);
  JsonValue& operator=(JsonValue&&) noexcept;
  ~JsonValue();

  static JsonValue null() { return JsonValue(); }
  static JsonValue boolean(bool b);
  static JsonValue number(Decimal d);
  static JsonValue number(int64_t v) { return number(Decimal::from_int(v)); }
  static JsonValue number(double v) { return number(Decimal::from_double(v)); }
  static JsonValue string(std::string s);
  static JsonValue array(Array items = {});
  static JsonValue object(Object members = {});

  // Parses a complete JSON document (leading/trailing whitespace allowed).
  // Throws JsonParseError with the byte offset of the first error.
  static JsonValue parse(std::string_view text);

  Kind kind() const { return kind_; }
  bool is_null() const { return kind_ == Kind::Null; }
  bool is_boolean() const { return kind_ == Kind::Boolean; }
  bool is_number() const { return kind_ == Kind::Number; }
  bool is_string() const { return kind_ == Kind::String; }
  bool is_array() const { return kind_ == Kind::Array; }
  bool is_object() const { return kind_ == Kind::Object; }

  bool as_boolean() const { return boolean_; }
  const Decimal& as_number() const { return number_; }
  const std::string& as_string() const { return string_; }
  const Array& as_array() const { return *array_; }
  const Object& as_object() const { return *object_; }

  // Object lookup by key; nullptr when absent or not an object.
  const JsonValue* find(std::string_view key) const;

  // Builders for assembling documents (reports, fixtures). set() replaces an
  // existing member in place, preserving its position.
  void set(std::string key, JsonValue v);
  void push_back(JsonValue v);

  // Canonical compact serialization: no whitespace, original key order,
  // shortest round-trip number rendering, minimal string escaping.
  std::string serialize() const;
  // Indented rendering for human-facing output.
  std::string serialize_pretty(int indent = 2) const;

  // JSON Schema equality: numbers by value, object keys order-insensitive.
  bool operator==(const JsonValue& other) const;
  bool operator!=(const JsonValue& other) const { return !(*this == other); }

  // Order-insensitive structural hash, consistent with operator==.
  size_t structural_hash() const;

 private:
  Kind kind_ = Kind::Null;
  bool boolean_ = false;
  Decimal number_;
  std::string string_;
  std::unique_ptr<Array> array_;
  std::unique_ptr<Object> object_;
};

struct JsonValue::Member {
  std::string key;
  JsonValue value;
};

// Escapes a UTF-8 string into a JSON string literal body (no quotes).
std::string json_escape(std::string_view s);

}  // namespace tokengate

#endif  // TOKENGATE_JSON_VALUE_HPP_
