/*!
 * Copyright (c) 2026 by Contributors
 * \file src/json_value.cpp
 * \brief JSON parsing, canonical serialization, decimal arithmetic.
 */
#include "tokengate/json_value.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <charconv>
#include <cstring>

namespace tokengate {

// ---------------------------------------------------------------------------
// Decimal
// ---------------------------------------------------------------------------

namespace {

// Strips leading/trailing zeros from a digit run, adjusting the exponent for
// each trailing zero removed.
void normalize_decimal(std::string& digits, int64_t& exponent, bool& negative) {
  size_t first = digits.find_first_not_of('0');
  if (first == std::string::npos) {
    digits = "0";
    exponent = 0;
    return;
  }
  digits.erase(0, first);
  size_t last = digits.find_last_not_of('0');
  int64_t stripped = static_cast<int64_t>(digits.size() - 1 - last);
  digits.erase(last + 1);
  exponent += stripped;
  (void)negative;
}

}  // namespace

Decimal Decimal::from_lexeme(std::string_view text) {
  Decimal d;
  size_t i = 0;
  auto fail = [&]() { throw std::invalid_argument("bad number lexeme: " + std::string(text)); };
  if (i < text.size() && text[i] == '-') {
    d.negative = true;
    ++i;
  }
  std::string int_digits;
  if (i >= text.size() || !isdigit(static_cast<unsigned char>(text[i]))) fail();
  if (text[i] == '0') {
    int_digits = "0";
    ++i;
  } else {
    while (i < text.size() && isdigit(static_cast<unsigned char>(text[i]))) int_digits += text[i++];
  }
  std::string frac_digits;
  if (i < text.size() && text[i] == '.') {
    ++i;
    if (i >= text.size() || !isdigit(static_cast<unsigned char>(text[i]))) fail();
    while (i < text.size() && isdigit(static_cast<unsigned char>(text[i]))) frac_digits += text[i++];
  }
  int64_t exp_part = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      exp_neg = text[i] == '-';
      ++i;
    }
    if (i >= text.size() || !isdigit(static_cast<unsigned char>(text[i]))) fail();
    while (i < text.size() && isdigit(static_cast<unsigned char>(text[i]))) {
      int dig = text[i++] - '0';
      if (exp_part > (INT64_MAX - dig) / 10) fail();  // exponent overflow
      exp_part = exp_part * 10 + dig;
    }
    if (exp_neg) exp_part = -exp_part;
  }
  if (i != text.size()) fail();

  d.digits = int_digits + frac_digits;
  d.exponent = exp_part - static_cast<int64_t>(frac_digits.size());
  normalize_decimal(d.digits, d.exponent, d.negative);
  return d;
}

Decimal Decimal::from_int(int64_t v) {
  Decimal d;
  if (v < 0) {
    d.negative = true;
    // avoid overflow on INT64_MIN
    d.digits = std::to_string(static_cast<uint64_t>(-(v + 1)) + 1);
  } else {
    d.digits = std::to_string(v);
  }
  d.exponent = 0;
  normalize_decimal(d.digits, d.exponent, d.negative);
  return d;
}

Decimal Decimal::from_double(double v) {
  std::array<char, 64> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return from_lexeme(std::string_view(buf.data(), res.ptr - buf.data()));
}

int Decimal::compare(const Decimal& other) const {
  bool a_zero = is_zero(), b_zero = other.is_zero();
  if (a_zero && b_zero) return 0;
  if (a_zero) return other.negative ? 1 : -1;
  if (b_zero) return negative ? -1 : 1;
  if (negative != other.negative) return negative ? -1 : 1;
  int sign = negative ? -1 : 1;
  // Position of the most significant digit: value in [10^(p-1), 10^p).
  int64_t pa = exponent + static_cast<int64_t>(digits.size());
  int64_t pb = other.exponent + static_cast<int64_t>(other.digits.size());
  if (pa != pb) return (pa < pb ? -1 : 1) * sign;
  // Same magnitude class: lexicographic compare with implicit trailing zeros.
  size_t n = std::max(digits.size(), other.digits.size());
  for (size_t i = 0; i < n; ++i) {
    char ca = i < digits.size() ? digits[i] : '0';
    char cb = i < other.digits.size() ? other.digits[i] : '0';
    if (ca != cb) return (ca < cb ? -1 : 1) * sign;
  }
  return 0;
}

namespace {

// Remainder of (string-encoded nonneg integer) mod (string-encoded positive
// integer), by long division. Both inputs have no leading zeros.
std::string string_mod(const std::string& value, const std::string& divisor) {
  auto ge = [](const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a >= b;
  };
  auto sub = [](std::string a, const std::string& b) {
    // a >= b guaranteed
    int borrow = 0;
    size_t off = a.size() - b.size();
    for (size_t i = b.size(); i-- > 0;) {
      int da = a[off + i] - '0', db = b[i] - '0';
      int r = da - db - borrow;
      borrow = r < 0;
      if (r < 0) r += 10;
      a[off + i] = static_cast<char>('0' + r);
    }
    for (size_t i = off; borrow && i-- > 0;) {
      int r = a[i] - '0' - borrow;
      borrow = r < 0;
      if (r < 0) r += 10;
      a[i] = static_cast<char>('0' + r);
    }
    size_t first = a.find_first_not_of('0');
    return first == std::string::npos ? std::string("0") : a.substr(first);
  };
  std::string rem = "0";
  for (char c : value) {
    rem = rem == "0" ? std::string(1, c) : rem + c;
    size_t first = rem.find_first_not_of('0');
    rem = first == std::string::npos ? "0" : rem.substr(first);
    while (rem != "0" && ge(rem, divisor)) rem = sub(rem, divisor);
  }
  return rem;
}

}  // namespace

bool Decimal::is_multiple_of(const Decimal& d) const {
  if (d.is_zero()) return false;
  if (is_zero()) return true;
  // this/d = (A/B) * 10^(ea-eb) with A,B the digit strings.
  std::string a = digits, b = d.digits;
  int64_t shift = exponent - d.exponent;
  if (shift >= 0) {
    // B | A*10^s stabilizes once s exceeds the largest power of 2 or 5 in B,
    // which is below 4*len(B)+4; capping the appended zeros there is exact.
    int64_t cap = 4 * static_cast<int64_t>(b.size()) + 4;
    a.append(static_cast<size_t>(std::min(shift, cap)), '0');
  } else {
    // Divisor B*10^k exceeds A outright once k >= len(A).
    if (-shift > static_cast<int64_t>(a.size())) return false;
    b.append(static_cast<size_t>(-shift), '0');
  }
  return string_mod(a, b) == "0";
}

std::optional<int64_t> Decimal::to_int64() const {
  if (!is_integer()) return std::nullopt;
  if (is_zero()) return 0;
  if (exponent > 19) return std::nullopt;
  std::string full = digits + std::string(static_cast<size_t>(exponent), '0');
  if (full.size() > 19) return std::nullopt;
  uint64_t mag = 0;
  for (char c : full) mag = mag * 10 + static_cast<uint64_t>(c - '0');
  if (negative) {
    if (mag > static_cast<uint64_t>(INT64_MAX) + 1) return std::nullopt;
    return mag == static_cast<uint64_t>(INT64_MAX) + 1 ? INT64_MIN : -static_cast<int64_t>(mag);
  }
  if (mag > static_cast<uint64_t>(INT64_MAX)) return std::nullopt;
  return static_cast<int64_t>(mag);
}

std::string Decimal::to_string() const {
  if (is_zero()) return negative ? "-0" : "0";
  std::string out = negative ? "-" : "";
  int64_t n = static_cast<int64_t>(digits.size());
  int64_t point = n + exponent;  // digits left of the decimal point
  if (exponent >= 0 && point <= 21) {
    out += digits;
    out.append(static_cast<size_t>(exponent), '0');
  } else if (exponent < 0 && point > 0 && point <= 21) {
    out += digits.substr(0, static_cast<size_t>(point));
    out += '.';
    out += digits.substr(static_cast<size_t>(point));
  } else if (exponent < 0 && point <= 0 && point > -6) {
    out += "0.";
    out.append(static_cast<size_t>(-point), '0');
    out += digits;
  } else {
    out += digits.substr(0, 1);
    if (n > 1) {
      out += '.';
      out += digits.substr(1);
    }
    out += 'e';
    out += std::to_string(point - 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JsonValue construction
// ---------------------------------------------------------------------------

JsonValue::JsonValue(const JsonValue& other)
    : kind_(other.kind_),
      boolean_(other.boolean_),
      number_(other.number_),
      string_(other.string_) {
  if (other.array_) array_ = std::make_unique<Array>(*other.array_);
  if (other.object_) object_ = std::make_unique<Object>(*other.object_);
}

JsonValue::JsonValue(JsonValue&&) noexcept = default;
JsonValue& JsonValue::operator=(JsonValue&&) noexcept = default;
JsonValue::~JsonValue() = default;

JsonValue& JsonValue::operator=(const JsonValue& other) {
  if (this == &other) return *this;
  JsonValue tmp(other);
  *this = std::move(tmp);
  return *this;
}

JsonValue JsonValue::boolean(bool b) {
  JsonValue v;
  v.kind_ = Kind::Boolean;
  v.boolean_ = b;
  return v;
}

JsonValue JsonValue::number(Decimal d) {
  JsonValue v;
  v.kind_ = Kind::Number;
  v.number_ = std::move(d);
  return v;
}

JsonValue JsonValue::string(std::string s) {
  JsonValue v;
  v.kind_ = Kind::String;
  v.string_ = std::move(s);
  return v;
}

JsonValue JsonValue::array(Array items) {
  JsonValue v;
  v.kind_ = Kind::Array;
  v.array_ = std::make_unique<Array>(std::move(items));
  return v;
}

JsonValue JsonValue::object(Object members) {
  JsonValue v;
  v.kind_ = Kind::Object;
  v.object_ = std::make_unique<Object>(std::move(members));
  return v;
}

const JsonValue* JsonValue::find(std::string_view key) const {
  if (kind_ != Kind::Object) return nullptr;
  for (const auto& m : *object_) {
    if (m.key == key) return &m.value;
  }
  return nullptr;
}

void JsonValue::set(std::string key, JsonValue v) {
  assert(kind_ == Kind::Object);
  for (auto& m : *object_) {
    if (m.key == key) {
      m.value = std::move(v);
      return;
    }
  }
  object_->push_back(Member{std::move(key), std::move(v)});
}

void JsonValue::push_back(JsonValue v) {
  assert(kind_ == Kind::Array);
  array_->push_back(std::move(v));
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

constexpr int kMaxParseDepth = 512;

struct Parser {
  std::string_view text;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) { throw JsonParseError(pos, msg); }

  bool at_end() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  void skip_ws() {
    while (!at_end()) {
      char c = text[pos];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
        ++pos;
      else
        break;
    }
  }

  void expect(char c) {
    if (at_end() || text[pos] != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }

  void append_utf8(std::string& out, uint32_t cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  uint32_t parse_hex4() {
    if (pos + 4 > text.size()) fail("truncated \\u escape");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      char c = text[pos++];
      v <<= 4;
      if (c >= '0' && c <= '9')
        v |= static_cast<uint32_t>(c - '0');
      else if (c >= 'a' && c <= 'f')
        v |= static_cast<uint32_t>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F')
        v |= static_cast<uint32_t>(c - 'A' + 10);
      else
        fail("bad hex digit in \\u escape");
    }
    return v;
  }

  std::string parse_string_body() {
    expect('"');
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated string");
      unsigned char c = static_cast<unsigned char>(text[pos]);
      if (c == '"') {
        ++pos;
        return out;
      }
      if (c == '\\') {
        ++pos;
        if (at_end()) fail("unterminated escape");
        char e = text[pos++];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case '/': out += '/'; break;
          case 'b': out += '\b'; break;
          case 'f': out += '\f'; break;
          case 'n': out += '\n'; break;
          case 'r': out += '\r'; break;
          case 't': out += '\t'; break;
          case 'u': {
            uint32_t cp = parse_hex4();
            if (cp >= 0xD800 && cp <= 0xDBFF) {
              // high surrogate: join with a following low surrogate, else U+FFFD
              if (pos + 1 < text.size() && text[pos] == '\\' && text[pos + 1] == 'u') {
                size_t save = pos;
                pos += 2;
                uint32_t lo = parse_hex4();
                if (lo >= 0xDC00 && lo <= 0xDFFF) {
                  cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
                } else {
                  pos = save;
                  cp = 0xFFFD;
                }
              } else {
                cp = 0xFFFD;
              }
            } else if (cp >= 0xDC00 && cp <= 0xDFFF) {
              cp = 0xFFFD;  // lone low surrogate
            }
            append_utf8(out, cp);
            break;
          }
          default: fail("bad escape character");
        }
        continue;
      }
      if (c < 0x20) fail("unescaped control character in string");
      out += static_cast<char>(c);
      ++pos;
    }
  }

  JsonValue parse_number() {
    size_t start = pos;
    if (!at_end() && text[pos] == '-') ++pos;
    if (at_end() || !isdigit(static_cast<unsigned char>(text[pos]))) fail("bad number");
    if (text[pos] == '0') {
      ++pos;
    } else {
      while (!at_end() && isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    if (!at_end() && text[pos] == '.') {
      ++pos;
      if (at_end() || !isdigit(static_cast<unsigned char>(text[pos]))) fail("bad number fraction");
      while (!at_end() && isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    if (!at_end() && (text[pos] == 'e' || text[pos] == 'E')) {
      ++pos;
      if (!at_end() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      if (at_end() || !isdigit(static_cast<unsigned char>(text[pos]))) fail("bad number exponent");
      while (!at_end() && isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    return JsonValue::number(Decimal::from_lexeme(text.substr(start, pos - start)));
  }

  bool try_literal(std::string_view lit) {
    if (text.substr(pos, lit.size()) == lit) {
      pos += lit.size();
      return true;
    }
    return false;
  }

  JsonValue parse_value(int depth) {
    if (depth > kMaxParseDepth) fail("nesting too deep");
    skip_ws();
    if (at_end()) fail("unexpected end of input");
    char c = peek();
    switch (c) {
      case 'n':
        if (try_literal("null")) return JsonValue::null();
        fail("bad literal");
      case 't':
        if (try_literal("true")) return JsonValue::boolean(true);
        fail("bad literal");
      case 'f':
        if (try_literal("false")) return JsonValue::boolean(false);
        fail("bad literal");
      case '"': return JsonValue::string(parse_string_body());
      case '[': {
        ++pos;
        JsonValue::Array items;
        skip_ws();
        if (!at_end() && peek() == ']') {
          ++pos;
          return JsonValue::array(std::move(items));
        }
        while (true) {
          items.push_back(parse_value(depth + 1));
          skip_ws();
          if (at_end()) fail("unterminated array");
          if (peek() == ',') {
            ++pos;
            continue;
          }
          if (peek() == ']') {
            ++pos;
            return JsonValue::array(std::move(items));
          }
          fail("expected ',' or ']'");
        }
      }
      case '{': {
        ++pos;
        JsonValue::Object members;
        skip_ws();
        if (!at_end() && peek() == '}') {
          ++pos;
          return JsonValue::object(std::move(members));
        }
        while (true) {
          skip_ws();
          if (at_end() || peek() != '"') fail("expected object key");
          size_t key_pos = pos;
          std::string key = parse_string_body();
          for (const auto& m : members) {
            if (m.key == key) {
              pos = key_pos;
              fail("duplicate object key \"" + key + "\"");
            }
          }
          skip_ws();
          expect(':');
          JsonValue v = parse_value(depth + 1);
          members.push_back(JsonValue::Member{std::move(key), std::move(v)});
          skip_ws();
          if (at_end()) fail("unterminated object");
          if (peek() == ',') {
            ++pos;
            continue;
          }
          if (peek() == '}') {
            ++pos;
            return JsonValue::object(std::move(members));
          }
          fail("expected ',' or '}'");
        }
      }
      default:
        if (c == '-' || isdigit(static_cast<unsigned char>(c))) return parse_number();
        fail("unexpected character");
    }
  }
};

}  // namespace

JsonValue JsonValue::parse(std::string_view text) {
  Parser p{text};
  JsonValue v = p.parse_value(0);
  p.skip_ws();
  if (!p.at_end()) p.fail("trailing content after document");
  return v;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  static const char* hex = "0123456789abcdef";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          out += "\\u00";
          out += hex[c >> 4];
          out += hex[c & 0xF];
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

namespace {

void serialize_to(const JsonValue& v, std::string& out, int indent, int depth) {
  auto newline = [&](int d) {
    if (indent <= 0) return;
    out += '\n';
    out.append(static_cast<size_t>(indent * d), ' ');
  };
  switch (v.kind()) {
    case JsonValue::Kind::Null: out += "null"; break;
    case JsonValue::Kind::Boolean: out += v.as_boolean() ? "true" : "false"; break;
    case JsonValue::Kind::Number: out += v.as_number().to_string(); break;
    case JsonValue::Kind::String:
      out += '"';
      out += json_escape(v.as_string());
      out += '"';
      break;
    case JsonValue::Kind::Array: {
      const auto& items = v.as_array();
      out += '[';
      for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += ',';
        newline(depth + 1);
        serialize_to(items[i], out, indent, depth + 1);
      }
      if (!items.empty()) newline(depth);
      out += ']';
      break;
    }
    case JsonValue::Kind::Object: {
      const auto& members = v.as_object();
      out += '{';
      for (size_t i = 0; i < members.size(); ++i) {
        if (i) out += ',';
        newline(depth + 1);
        out += '"';
        out += json_escape(members[i].key);
        out += "\":";
        if (indent > 0) out += ' ';
        serialize_to(members[i].value, out, indent, depth + 1);
      }
      if (!members.empty()) newline(depth);
      out += '}';
      break;
    }
  }
}

}  // namespace

std::string JsonValue::serialize() const {
  std::string out;
  serialize_to(*this, out, 0, 0);
  return out;
}

std::string JsonValue::serialize_pretty(int indent) const {
  std::string out;
  serialize_to(*this, out, indent, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Equality / hashing
// ---------------------------------------------------------------------------

bool JsonValue::operator==(const JsonValue& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case Kind::Null: return true;
    case Kind::Boolean: return boolean_ == other.boolean_;
    case Kind::Number: return number_ == other.number_;
    case Kind::String: return string_ == other.string_;
    case Kind::Array: {
      const auto& a = *array_;
      const auto& b = *other.array_;
      if (a.size() != b.size()) return false;
      for (size_t i = 0; i < a.size(); ++i)
        if (!(a[i] == b[i])) return false;
      return true;
    }
    case Kind::Object: {
      const auto& a = *object_;
      const auto& b = *other.object_;
      if (a.size() != b.size()) return false;
      for (const auto& m : a) {
        const JsonValue* bv = other.find(m.key);
        if (!bv || !(m.value == *bv)) return false;
      }
      return true;
    }
  }
  return false;
}

size_t JsonValue::structural_hash() const {
  auto mix = [](size_t h, size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); };
  switch (kind_) {
    case Kind::Null: return 0x1;
    case Kind::Boolean: return boolean_ ? 0x3 : 0x2;
    case Kind::Number: {
      size_t h = std::hash<std::string>{}(number_.digits);
      h = mix(h, std::hash<int64_t>{}(number_.exponent));
      // -0 hashes like 0 to stay consistent with operator==
      if (number_.negative && !number_.is_zero()) h = mix(h, 0x5);
      return h;
    }
    case Kind::String: return mix(0x7, std::hash<std::string>{}(string_));
    case Kind::Array: {
      size_t h = 0x11;
      for (const auto& v : *array_) h = mix(h, v.structural_hash());
      return h;
    }
    case Kind::Object: {
      // order-insensitive: combine member hashes commutatively
      size_t h = 0x13;
      size_t acc = 0;
      for (const auto& m : *object_) {
        size_t mh = mix(std::hash<std::string>{}(m.key), m.value.structural_hash());
        acc += mh * 0x9e3779b97f4a7c15ULL;
      }
      return mix(h, acc);
    }
  }
  return 0;
}

}  // namespace tokengate
