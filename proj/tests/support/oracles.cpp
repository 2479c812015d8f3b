#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <regex>
#include <sstream>

namespace oracles {

using tokengate::JsonValue;

// ---------------------------------------------------------------------------
// Naive validator
// ---------------------------------------------------------------------------

namespace {

double number_of(const JsonValue& v) { return std::strtod(v.as_number().to_string().c_str(), nullptr); }

size_t codepoints(const std::string& s) {
  size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

const JsonValue* follow_pointer(const JsonValue& root, const std::string& ref) {
  if (ref == "#") return &root;
  if (ref.rfind("#/", 0) != 0) return nullptr;
  const JsonValue* cur = &root;
  std::string rest = ref.substr(2);
  std::istringstream ss(rest);
  std::string token;
  while (std::getline(ss, token, '/')) {
    std::string key;
    for (size_t i = 0; i < token.size(); ++i) {
      if (token[i] == '~' && i + 1 < token.size() && token[i + 1] == '0') {
        key += '~';
        ++i;
      } else if (token[i] == '~' && i + 1 < token.size() && token[i + 1] == '1') {
        key += '/';
        ++i;
      } else {
        key += token[i];
      }
    }
    if (cur->is_object()) {
      cur = cur->find(key);
      if (!cur) return nullptr;
    } else if (cur->is_array()) {
      size_t idx = std::strtoull(key.c_str(), nullptr, 10);
      if (idx >= cur->as_array().size()) return nullptr;
      cur = &cur->as_array()[idx];
    } else {
      return nullptr;
    }
  }
  return cur;
}

bool type_ok(const std::string& name, const JsonValue& v) {
  if (name == "null") return v.is_null();
  if (name == "boolean") return v.is_boolean();
  if (name == "string") return v.is_string();
  if (name == "array") return v.is_array();
  if (name == "object") return v.is_object();
  if (name == "number") return v.is_number();
  if (name == "integer") return v.is_number() && v.as_number().is_integer();
  return false;
}

}  // namespace

bool naive_validate(const JsonValue& root, const JsonValue& schema, const JsonValue& inst) {
  if (schema.is_boolean()) return schema.as_boolean();
  if (!schema.is_object()) return true;

  if (const JsonValue* ref = schema.find("$ref"); ref && ref->is_string()) {
    const JsonValue* target = follow_pointer(root, ref->as_string());
    if (!target || !naive_validate(root, *target, inst)) return false;
  }
  if (const JsonValue* t = schema.find("type")) {
    bool ok = false;
    if (t->is_string()) ok = type_ok(t->as_string(), inst);
    if (t->is_array())
      for (const auto& alt : t->as_array())
        if (alt.is_string() && type_ok(alt.as_string(), inst)) ok = true;
    if (!ok) return false;
  }
  if (const JsonValue* e = schema.find("enum"); e && e->is_array()) {
    bool hit = false;
    for (const auto& cand : e->as_array())
      if (cand == inst) hit = true;
    if (!hit) return false;
  }
  if (const JsonValue* c = schema.find("const")) {
    if (!(*c == inst)) return false;
  }
  if (inst.is_number()) {
    double x = number_of(inst);
    if (const JsonValue* b = schema.find("minimum"); b && b->is_number() && x < number_of(*b))
      return false;
    if (const JsonValue* b = schema.find("maximum"); b && b->is_number() && x > number_of(*b))
      return false;
    if (const JsonValue* b = schema.find("exclusiveMinimum");
        b && b->is_number() && x <= number_of(*b))
      return false;
    if (const JsonValue* b = schema.find("exclusiveMaximum");
        b && b->is_number() && x >= number_of(*b))
      return false;
    if (const JsonValue* m = schema.find("multipleOf"); m && m->is_number()) {
      double q = x / number_of(*m);
      if (std::fabs(q - std::round(q)) > 1e-9) return false;
    }
  }
  if (inst.is_string()) {
    const std::string& s = inst.as_string();
    if (const JsonValue* b = schema.find("minLength");
        b && b->is_number() && codepoints(s) < static_cast<size_t>(number_of(*b)))
      return false;
    if (const JsonValue* b = schema.find("maxLength");
        b && b->is_number() && codepoints(s) > static_cast<size_t>(number_of(*b)))
      return false;
    if (const JsonValue* p = schema.find("pattern"); p && p->is_string()) {
      std::regex re(p->as_string(), std::regex::ECMAScript);
      if (!std::regex_search(s, re)) return false;
    }
    if (const JsonValue* f = schema.find("format"); f && f->is_string()) {
      const std::string& name = f->as_string();
      bool ok = true;
      if (name == "date") ok = check_date(s);
      else if (name == "time") ok = check_time(s);
      else if (name == "date-time") ok = check_date_time(s);
      else if (name == "email") ok = check_email(s);
      else if (name == "uri") ok = check_uri(s);
      else if (name == "uuid") ok = check_uuid(s);
      else if (name == "ipv4") ok = check_ipv4(s);
      else if (name == "ipv6") ok = check_ipv6(s);
      if (!ok) return false;
    }
  }
  if (inst.is_array()) {
    const auto& items = inst.as_array();
    size_t prefix_len = 0;
    if (const JsonValue* p = schema.find("prefixItems"); p && p->is_array()) {
      prefix_len = p->as_array().size();
      for (size_t i = 0; i < items.size() && i < prefix_len; ++i)
        if (!naive_validate(root, p->as_array()[i], items[i])) return false;
    }
    if (const JsonValue* it = schema.find("items"); it && !it->is_array()) {
      for (size_t i = prefix_len; i < items.size(); ++i)
        if (!naive_validate(root, *it, items[i])) return false;
    }
    if (const JsonValue* b = schema.find("minItems");
        b && b->is_number() && items.size() < static_cast<size_t>(number_of(*b)))
      return false;
    if (const JsonValue* b = schema.find("maxItems");
        b && b->is_number() && items.size() > static_cast<size_t>(number_of(*b)))
      return false;
    if (const JsonValue* u = schema.find("uniqueItems"); u && u->is_boolean() && u->as_boolean()) {
      for (size_t i = 0; i < items.size(); ++i)
        for (size_t j = i + 1; j < items.size(); ++j)
          if (items[i] == items[j]) return false;
    }
    if (const JsonValue* c = schema.find("contains")) {
      int found = 0;
      for (const auto& item : items)
        if (naive_validate(root, *c, item)) ++found;
      int lo = 1, hi = -1;
      if (const JsonValue* b = schema.find("minContains"); b && b->is_number())
        lo = static_cast<int>(number_of(*b));
      if (const JsonValue* b = schema.find("maxContains"); b && b->is_number())
        hi = static_cast<int>(number_of(*b));
      if (found < lo) return false;
      if (hi >= 0 && found > hi) return false;
    }
  }
  if (inst.is_object()) {
    const auto& members = inst.as_object();
    if (const JsonValue* req = schema.find("required"); req && req->is_array()) {
      for (const auto& r : req->as_array())
        if (r.is_string() && !inst.find(r.as_string())) return false;
    }
    if (const JsonValue* b = schema.find("minProperties");
        b && b->is_number() && members.size() < static_cast<size_t>(number_of(*b)))
      return false;
    if (const JsonValue* b = schema.find("maxProperties");
        b && b->is_number() && members.size() > static_cast<size_t>(number_of(*b)))
      return false;
    const JsonValue* props = schema.find("properties");
    const JsonValue* pattern_props = schema.find("patternProperties");
    const JsonValue* add = schema.find("additionalProperties");
    for (const auto& m : members) {
      bool matched = false;
      if (props && props->is_object()) {
        if (const JsonValue* sub = props->find(m.key)) {
          matched = true;
          if (!naive_validate(root, *sub, m.value)) return false;
        }
      }
      if (pattern_props && pattern_props->is_object()) {
        for (const auto& pp : pattern_props->as_object()) {
          std::regex re(pp.key, std::regex::ECMAScript);
          if (std::regex_search(m.key, re)) {
            matched = true;
            if (!naive_validate(root, pp.value, m.value)) return false;
          }
        }
      }
      if (!matched && add) {
        if (!naive_validate(root, *add, m.value)) return false;
      }
    }
    if (const JsonValue* names = schema.find("propertyNames")) {
      for (const auto& m : members)
        if (!naive_validate(root, *names, JsonValue::string(m.key))) return false;
    }
    if (const JsonValue* dr = schema.find("dependentRequired"); dr && dr->is_object()) {
      for (const auto& dep : dr->as_object()) {
        if (!inst.find(dep.key) || !dep.value.is_array()) continue;
        for (const auto& r : dep.value.as_array())
          if (r.is_string() && !inst.find(r.as_string())) return false;
      }
    }
    if (const JsonValue* ds = schema.find("dependentSchemas"); ds && ds->is_object()) {
      for (const auto& dep : ds->as_object())
        if (inst.find(dep.key) && !naive_validate(root, dep.value, inst)) return false;
    }
  }
  if (const JsonValue* all = schema.find("allOf"); all && all->is_array()) {
    for (const auto& sub : all->as_array())
      if (!naive_validate(root, sub, inst)) return false;
  }
  if (const JsonValue* any = schema.find("anyOf"); any && any->is_array()) {
    bool hit = false;
    for (const auto& sub : any->as_array())
      if (naive_validate(root, sub, inst)) hit = true;
    if (!hit) return false;
  }
  if (const JsonValue* one = schema.find("oneOf"); one && one->is_array()) {
    int hits = 0;
    for (const auto& sub : one->as_array())
      if (naive_validate(root, sub, inst)) ++hits;
    if (hits != 1) return false;
  }
  if (const JsonValue* neg = schema.find("not")) {
    if (naive_validate(root, *neg, inst)) return false;
  }
  if (const JsonValue* cond = schema.find("if")) {
    if (naive_validate(root, *cond, inst)) {
      if (const JsonValue* then_s = schema.find("then"))
        if (!naive_validate(root, *then_s, inst)) return false;
    } else {
      if (const JsonValue* else_s = schema.find("else"))
        if (!naive_validate(root, *else_s, inst)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Toy universe
// ---------------------------------------------------------------------------

std::vector<JsonValue> toy_universe() {
  std::vector<JsonValue> atoms;
  atoms.push_back(JsonValue::null());
  atoms.push_back(JsonValue::boolean(true));
  atoms.push_back(JsonValue::boolean(false));
  for (int i = -2; i <= 3; ++i) atoms.push_back(JsonValue::number(static_cast<int64_t>(i)));
  atoms.push_back(JsonValue::number(tokengate::Decimal::from_lexeme("1.5")));
  std::vector<std::string> strings = {""};
  for (char a : {'a', 'b', 'c'}) strings.push_back(std::string(1, a));
  for (char a : {'a', 'b', 'c'})
    for (char b : {'a', 'b', 'c'}) strings.push_back(std::string{a, b});
  for (const auto& s : strings) atoms.push_back(JsonValue::string(s));

  std::vector<JsonValue> universe = atoms;
  // arrays of atoms, length <= 2
  universe.push_back(JsonValue::array());
  for (const auto& x : atoms) {
    universe.push_back(JsonValue::array({x}));
    universe.push_back(JsonValue::array({x, x}));
  }
  for (size_t i = 0; i + 4 < atoms.size(); i += 5)
    universe.push_back(JsonValue::array({atoms[i], atoms[i + 4]}));
  // objects over keys {a, b} with atom values
  universe.push_back(JsonValue::object());
  for (const auto& x : atoms) {
    JsonValue obj = JsonValue::object();
    obj.set("a", x);
    universe.push_back(obj);
    JsonValue obj2 = JsonValue::object();
    obj2.set("b", x);
    universe.push_back(obj2);
    JsonValue obj3 = JsonValue::object();
    obj3.set("a", x);
    obj3.set("b", x);
    universe.push_back(obj3);
  }
  // depth-2 nesting
  for (size_t i = 0; i + 7 < atoms.size(); i += 7) {
    JsonValue inner = JsonValue::array({atoms[i]});
    universe.push_back(JsonValue::array({inner}));
    JsonValue obj = JsonValue::object();
    obj.set("a", inner);
    universe.push_back(obj);
    JsonValue outer = JsonValue::object();
    JsonValue inner_obj = JsonValue::object();
    inner_obj.set("b", atoms[i]);
    outer.set("a", inner_obj);
    universe.push_back(outer);
  }
  return universe;
}

// ---------------------------------------------------------------------------
// Format checkers (field-wise, procedural)
// ---------------------------------------------------------------------------

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

int to_int(const std::string& s) { return std::atoi(s.c_str()); }

}  // namespace

bool check_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  std::string y = s.substr(0, 4), m = s.substr(5, 2), d = s.substr(8, 2);
  if (!all_digits(y) || !all_digits(m) || !all_digits(d)) return false;
  int mi = to_int(m), di = to_int(d);
  return mi >= 1 && mi <= 12 && di >= 1 && di <= 31;
}

bool check_time(const std::string& s) {
  // HH:MM:SS[.frac](Z|+HH:MM|-HH:MM), seconds may be 60
  if (s.size() < 9) return false;
  if (s[2] != ':' || s[5] != ':') return false;
  std::string hh = s.substr(0, 2), mm = s.substr(3, 2), ss = s.substr(6, 2);
  if (!all_digits(hh) || !all_digits(mm) || !all_digits(ss)) return false;
  if (to_int(hh) > 23 || to_int(mm) > 59 || to_int(ss) > 60) return false;
  size_t i = 8;
  if (i < s.size() && s[i] == '.') {
    ++i;
    size_t start = i;
    while (i < s.size() && isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start) return false;
  }
  if (i >= s.size()) return false;
  if (s[i] == 'Z' || s[i] == 'z') return i + 1 == s.size();
  if (s[i] != '+' && s[i] != '-') return false;
  if (i + 6 != s.size()) return false;
  std::string oh = s.substr(i + 1, 2), om = s.substr(i + 4, 2);
  if (s[i + 3] != ':') return false;
  if (!all_digits(oh) || !all_digits(om)) return false;
  return to_int(oh) <= 23 && to_int(om) <= 59;
}

bool check_date_time(const std::string& s) {
  size_t t = s.find_first_of("Tt ");
  if (t == std::string::npos) return false;
  return check_date(s.substr(0, t)) && check_time(s.substr(t + 1));
}

bool check_email(const std::string& s) {
  size_t at = s.find('@');
  if (at == std::string::npos || at == 0 || at + 1 >= s.size()) return false;
  if (s.find('@', at + 1) != std::string::npos) return false;
  const std::string local = s.substr(0, at), domain = s.substr(at + 1);
  const std::string local_ok = "!#$%&'*+/=?^_`{|}~.-";
  for (char c : local)
    if (!isalnum(static_cast<unsigned char>(c)) && local_ok.find(c) == std::string::npos)
      return false;
  // domain: dot-separated labels, alnum with interior hyphens, >= 2 labels
  size_t label_count = 0;
  size_t pos = 0;
  while (pos <= domain.size()) {
    size_t dot = domain.find('.', pos);
    std::string label = domain.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (label.empty()) return false;
    if (!isalnum(static_cast<unsigned char>(label.front())) ||
        !isalnum(static_cast<unsigned char>(label.back())))
      return false;
    for (char c : label)
      if (!isalnum(static_cast<unsigned char>(c)) && c != '-') return false;
    ++label_count;
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return label_count >= 2;
}

bool check_uri(const std::string& s) {
  size_t colon = s.find(':');
  if (colon == std::string::npos || colon == 0) return false;
  if (!isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (size_t i = 1; i < colon; ++i) {
    char c = s[i];
    if (!isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '.' && c != '-') return false;
  }
  const std::string extra = "-._~:/?#[]@!$&'()*+,;=%";
  for (size_t i = colon + 1; i < s.size(); ++i) {
    char c = s[i];
    if (!isalnum(static_cast<unsigned char>(c)) && extra.find(c) == std::string::npos) return false;
  }
  return true;
}

bool check_uuid(const std::string& s) {
  if (s.size() != 36) return false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (i == 8 || i == 13 || i == 18 || i == 23) {
      if (s[i] != '-') return false;
    } else if (!isxdigit(static_cast<unsigned char>(s[i]))) {
      return false;
    }
  }
  return true;
}

bool check_ipv4(const std::string& s) {
  size_t pos = 0;
  int octets = 0;
  while (pos <= s.size()) {
    size_t dot = s.find('.', pos);
    std::string part = s.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (part.empty() || part.size() > 3 || !all_digits(part)) return false;
    if (part.size() > 1 && part[0] == '0') return false;  // no leading zeros
    if (to_int(part) > 255) return false;
    ++octets;
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return octets == 4;
}

bool check_ipv6(const std::string& s) {
  std::string head = s;
  bool v4_tail = false;
  size_t last_colon = s.rfind(':');
  if (last_colon != std::string::npos && s.find('.', last_colon) != std::string::npos) {
    if (!check_ipv4(s.substr(last_colon + 1))) return false;
    v4_tail = true;
    head = s.substr(0, last_colon + 1);  // keep the trailing colon
  }
  // split on "::" (at most one)
  size_t dc = head.find("::");
  if (dc != std::string::npos && head.find("::", dc + 1) != std::string::npos) return false;
  auto split_groups = [](const std::string& part) -> std::optional<std::vector<std::string>> {
    std::vector<std::string> groups;
    if (part.empty()) return groups;
    size_t pos = 0;
    while (pos <= part.size()) {
      size_t colon = part.find(':', pos);
      std::string g = part.substr(pos, colon == std::string::npos ? colon : colon - pos);
      groups.push_back(g);
      if (colon == std::string::npos) break;
      pos = colon + 1;
    }
    return groups;
  };
  auto valid_group = [](const std::string& g) {
    if (g.empty() || g.size() > 4) return false;
    for (char c : g)
      if (!isxdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };
  int target = v4_tail ? 6 : 8;
  if (dc == std::string::npos) {
    std::string part = head;
    if (v4_tail) {
      if (part.empty() || part.back() != ':') return false;
      part.pop_back();
    }
    auto groups = split_groups(part);
    if (!groups || static_cast<int>(groups->size()) != target) return false;
    for (const auto& g : *groups)
      if (!valid_group(g)) return false;
    return true;
  }
  std::string left = head.substr(0, dc);
  std::string right = head.substr(dc + 2);
  if (v4_tail) {
    if (!right.empty() && right.back() == ':')
      right.pop_back();
    else if (right.empty() && !v4_tail)
      return false;
  }
  auto lg = split_groups(left), rg = split_groups(right);
  if (!lg || !rg) return false;
  for (const auto& g : *lg)
    if (!valid_group(g)) return false;
  for (const auto& g : *rg)
    if (!valid_group(g)) return false;
  return static_cast<int>(lg->size() + rg->size()) <= target - 1;
}

// ---------------------------------------------------------------------------
// Medians and tries
// ---------------------------------------------------------------------------

double selection_median_lower(std::vector<double> values) {
  if (values.empty()) return 0.0;
  size_t target = (values.size() - 1) / 2;
  for (size_t round = 0; round <= target; ++round) {
    size_t min_at = round;
    for (size_t i = round + 1; i < values.size(); ++i)
      if (values[i] < values[min_at]) min_at = i;
    std::swap(values[round], values[min_at]);
  }
  return values[target];
}

size_t map_trie_node_count(const std::vector<std::string>& sequences) {
  std::map<std::string, bool> prefixes;
  prefixes[""] = true;
  for (const auto& s : sequences) {
    if (s.empty()) continue;
    for (size_t len = 1; len <= s.size(); ++len) prefixes[s.substr(0, len)] = true;
  }
  return prefixes.size();
}

// ---------------------------------------------------------------------------
// JSON prefix machine
// ---------------------------------------------------------------------------

enum class JsonPrefixMachine::S : uint8_t {
  Value,        // expecting a value
  InLiteral,    // inside true/false/null
  InString,     // inside a string body
  StrEscape,
  StrHex,
  NumMinus,
  NumZero,
  NumDigits,
  NumDot,
  NumFrac,
  NumExpMark,
  NumExpSign,
  NumExpDigits,
  AfterValue,   // value complete at current nesting
  ObjKeyOrClose,
  ObjKey,       // handled via InString-with-flag; kept distinct for clarity
  ObjColon,
  ObjAfterMember,
  ArrValueOrClose,
};

JsonPrefixMachine::JsonPrefixMachine() : state_(S::Value) {}

bool JsonPrefixMachine::complete() const {
  return alive_ && stack_.empty() &&
         (state_ == S::AfterValue || state_ == S::NumZero || state_ == S::NumDigits ||
          state_ == S::NumFrac || state_ == S::NumExpDigits);
}

bool JsonPrefixMachine::feed(uint8_t b) {
  struct Detail {
    std::string& literal_tail;
    bool& in_key;
    int& hex_left;
  } d{literal_tail_, in_key_, hex_left_};
  if (!alive_) return false;
  auto die = [&]() {
    alive_ = false;
    return false;
  };
  auto is_ws = [](uint8_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  auto value_done = [&]() { state_ = S::AfterValue; };

  auto start_value = [&](uint8_t c) -> bool {
    if (c == '{') {
      stack_.push_back('{');
      state_ = S::ObjKeyOrClose;
      return true;
    }
    if (c == '[') {
      stack_.push_back('[');
      state_ = S::ArrValueOrClose;
      return true;
    }
    if (c == '"') {
      d.in_key = false;
      state_ = S::InString;
      return true;
    }
    if (c == 't') {
      d.literal_tail = "rue";
      state_ = S::InLiteral;
      return true;
    }
    if (c == 'f') {
      d.literal_tail = "alse";
      state_ = S::InLiteral;
      return true;
    }
    if (c == 'n') {
      d.literal_tail = "ull";
      state_ = S::InLiteral;
      return true;
    }
    if (c == '-') {
      state_ = S::NumMinus;
      return true;
    }
    if (c == '0') {
      state_ = S::NumZero;
      return true;
    }
    if (c >= '1' && c <= '9') {
      state_ = S::NumDigits;
      return true;
    }
    return false;
  };

  // number states can end a value; the ending byte is re-dispatched
  auto finish_number_and_retry = [&](uint8_t c) -> bool {
    value_done();
    return feed(c);
  };

  switch (state_) {
    case S::Value:
      if (is_ws(b)) return true;
      if (!start_value(b)) return die();
      return true;
    case S::InLiteral:
      if (!d.literal_tail.empty() && static_cast<uint8_t>(d.literal_tail[0]) == b) {
        d.literal_tail.erase(0, 1);
        if (d.literal_tail.empty()) value_done();
        return true;
      }
      return die();
    case S::InString:
      if (b == '"') {
        if (d.in_key) {
          state_ = S::ObjColon;
        } else {
          value_done();
        }
        return true;
      }
      if (b == '\\') {
        state_ = S::StrEscape;
        return true;
      }
      if (b < 0x20) return die();
      return true;
    case S::StrEscape:
      if (b == 'u') {
        d.hex_left = 4;
        state_ = S::StrHex;
        return true;
      }
      if (strchr("\"\\/bfnrt", static_cast<char>(b))) {
        state_ = S::InString;
        return true;
      }
      return die();
    case S::StrHex:
      if (isxdigit(b)) {
        if (--d.hex_left == 0) state_ = S::InString;
        return true;
      }
      return die();
    case S::NumMinus:
      if (b == '0') {
        state_ = S::NumZero;
        return true;
      }
      if (b >= '1' && b <= '9') {
        state_ = S::NumDigits;
        return true;
      }
      return die();
    case S::NumZero:
      if (b == '.') {
        state_ = S::NumDot;
        return true;
      }
      if (b == 'e' || b == 'E') {
        state_ = S::NumExpMark;
        return true;
      }
      return finish_number_and_retry(b);
    case S::NumDigits:
      if (b >= '0' && b <= '9') return true;
      if (b == '.') {
        state_ = S::NumDot;
        return true;
      }
      if (b == 'e' || b == 'E') {
        state_ = S::NumExpMark;
        return true;
      }
      return finish_number_and_retry(b);
    case S::NumDot:
      if (b >= '0' && b <= '9') {
        state_ = S::NumFrac;
        return true;
      }
      return die();
    case S::NumFrac:
      if (b >= '0' && b <= '9') return true;
      if (b == 'e' || b == 'E') {
        state_ = S::NumExpMark;
        return true;
      }
      return finish_number_and_retry(b);
    case S::NumExpMark:
      if (b == '+' || b == '-') {
        state_ = S::NumExpSign;
        return true;
      }
      if (b >= '0' && b <= '9') {
        state_ = S::NumExpDigits;
        return true;
      }
      return die();
    case S::NumExpSign:
      if (b >= '0' && b <= '9') {
        state_ = S::NumExpDigits;
        return true;
      }
      return die();
    case S::NumExpDigits:
      if (b >= '0' && b <= '9') return true;
      return finish_number_and_retry(b);
    case S::AfterValue:
      if (is_ws(b)) return true;
      if (stack_.empty()) return die();
      if (stack_.back() == '{') {
        if (b == ',') {
          state_ = S::ObjKey;
          return true;
        }
        if (b == '}') {
          stack_.pop_back();
          value_done();
          return true;
        }
        return die();
      }
      if (b == ',') {
        state_ = S::Value;
        return true;
      }
      if (b == ']') {
        stack_.pop_back();
        value_done();
        return true;
      }
      return die();
    case S::ObjKeyOrClose:
      if (is_ws(b)) return true;
      if (b == '}') {
        stack_.pop_back();
        value_done();
        return true;
      }
      if (b == '"') {
        d.in_key = true;
        state_ = S::InString;
        return true;
      }
      return die();
    case S::ObjKey:
      if (is_ws(b)) return true;
      if (b == '"') {
        d.in_key = true;
        state_ = S::InString;
        return true;
      }
      return die();
    case S::ObjColon:
      if (is_ws(b)) return true;
      if (b == ':') {
        d.in_key = false;
        state_ = S::Value;
        return true;
      }
      return die();
    case S::ObjAfterMember:
      return die();  // unused
    case S::ArrValueOrClose:
      if (is_ws(b)) return true;
      if (b == ']') {
        stack_.pop_back();
        value_done();
        return true;
      }
      if (!start_value(b)) return die();
      return true;
  }
  return die();
}

}  // namespace oracles
