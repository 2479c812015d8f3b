/*!
 * Copyright (c) 2026 by Contributors
 * \file src/formats.cpp
 * \brief Format machine definitions.
 */
#include "tokengate/formats.hpp"

#include <map>
#include <mutex>

namespace tokengate {

namespace {

// RFC 3339 / RFC 2396-ish shapes. Day-of-month upper bounds are not coupled
// to the month; both the validator walk and the grammar share these machines,
// so they agree by construction.
constexpr const char* kDatePattern =
    "[0-9]{4}-(0[1-9]|1[0-2])-(0[1-9]|[12][0-9]|3[01])";

constexpr const char* kTimePattern =
    "([01][0-9]|2[0-3]):[0-5][0-9]:([0-5][0-9]|60)(\\.[0-9]+)?"
    "([Zz]|[+-]([01][0-9]|2[0-3]):[0-5][0-9])";

const std::string kDateTimePattern = std::string(kDatePattern) + "[Tt ]" + kTimePattern;

constexpr const char* kEmailPattern =
    "[A-Za-z0-9!#$%&'*+/=?^_`{|}~.-]+@[A-Za-z0-9]([A-Za-z0-9-]*[A-Za-z0-9])?"
    "(\\.[A-Za-z0-9]([A-Za-z0-9-]*[A-Za-z0-9])?)+";

constexpr const char* kUriPattern =
    "[A-Za-z][A-Za-z0-9+.-]*:[A-Za-z0-9\\-._~:/?#\\[\\]@!$&'()*+,;=%]*";

constexpr const char* kUuidPattern =
    "[0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12}";

constexpr const char* kIpv4Octet = "(25[0-5]|2[0-4][0-9]|1[0-9][0-9]|[1-9]?[0-9])";

const std::string kIpv4Pattern =
    "(" + std::string(kIpv4Octet) + "\\.){3}" + kIpv4Octet;

std::string ipv6_pattern() {
  const std::string h = "[0-9A-Fa-f]{1,4}";
  const std::string v4 = kIpv4Pattern;
  std::string p;
  p += "(" + h + ":){7}" + h;                              // full form
  p += "|(" + h + ":){1,7}:";                              // trailing ::
  p += "|(" + h + ":){1,6}:" + h;                          // :: with 1 group after
  p += "|(" + h + ":){1,5}(:" + h + "){1,2}";
  p += "|(" + h + ":){1,4}(:" + h + "){1,3}";
  p += "|(" + h + ":){1,3}(:" + h + "){1,4}";
  p += "|(" + h + ":){1,2}(:" + h + "){1,5}";
  p += "|" + h + ":(:" + h + "){1,6}";
  p += "|:((:" + h + "){1,7}|:)";                          // leading ::
  p += "|(" + h + ":){6}" + v4;                            // full with v4 tail
  p += "|(" + h + ":){1,5}:" + v4;
  p += "|(" + h + ":){1,4}(:" + h + "){0,1}:" + v4;
  p += "|(" + h + ":){1,3}(:" + h + "){0,2}:" + v4;
  p += "|(" + h + ":){1,2}(:" + h + "){0,3}:" + v4;
  p += "|" + h + ":(:" + h + "){0,4}:" + v4;
  p += "|::(" + h + ":){0,5}" + v4;
  return "(" + p + ")";
}

struct FormatTable {
  std::map<std::string, std::shared_ptr<const ByteNfa>, std::less<>> machines;

  FormatTable() {
    RegexOptions opts;
    opts.containment = false;
    machines["date"] = compile_regex(kDatePattern, opts);
    machines["time"] = compile_regex(kTimePattern, opts);
    machines["date-time"] = compile_regex(kDateTimePattern, opts);
    machines["email"] = compile_regex(kEmailPattern, opts);
    machines["uri"] = compile_regex(kUriPattern, opts);
    machines["uuid"] = compile_regex(kUuidPattern, opts);
    machines["ipv4"] = compile_regex(kIpv4Pattern, opts);
    machines["ipv6"] = compile_regex(ipv6_pattern(), opts);
  }
};

const FormatTable& table() {
  static FormatTable t;
  return t;
}

}  // namespace

const std::vector<std::string>& asserted_formats() {
  static const std::vector<std::string> names = {"date-time", "date", "time", "email",
                                                 "uri",       "uuid", "ipv4", "ipv6"};
  return names;
}

bool format_is_asserted(std::string_view name) {
  return table().machines.find(name) != table().machines.end();
}

std::shared_ptr<const ByteNfa> format_nfa(std::string_view name) {
  auto it = table().machines.find(name);
  return it == table().machines.end() ? nullptr : it->second;
}

bool format_check(std::string_view name, std::string_view value) {
  auto nfa = format_nfa(name);
  if (!nfa) return true;
  return regex_matches(*nfa, value);
}

}  // namespace tokengate
