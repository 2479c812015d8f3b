/*!
 * Copyright (c) 2026 by Contributors
 * \file tokengate/manifest.hpp
 * \brief Machine-readable declaration of keyword support.
 */
#ifndef TOKENGATE_MANIFEST_HPP_
#define TOKENGATE_MANIFEST_HPP_

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "tokengate/json_value.hpp"

namespace tokengate {

/*!
 * \brief Keyword -> support level table driving conservative rejection.
 *
 * A schema is declared-supported iff every keyword occurrence has Full
 * support or Partial support with its condition met. The serialized form is
 * a JSON object: keyword -> "full" | "partial:<condition>" | "none".
 */
class KeywordManifest {
 public:
  enum class Level { Full, Partial, None };
  struct Support {
    Level level = Level::None;
    std::string condition;  // Partial only
  };

  static KeywordManifest default_v1();
  static KeywordManifest from_json(const JsonValue& doc);
  static KeywordManifest load_file(const std::string& path);

  JsonValue to_json() const;

  // Unlisted keywords are annotations: carrying no constraint, they are
  // always supported.
  std::optional<Support> lookup(std::string_view keyword) const;
  bool is_constraint_keyword(std::string_view keyword) const {
    return entries_.count(std::string(keyword)) > 0;
  }

  const std::string& version() const { return version_; }
  const std::map<std::string, Support>& entries() const { return entries_; }

  void set(const std::string& keyword, Level level, std::string condition = "");

 private:
  std::string version_ = "v1";
  std::map<std::string, Support> entries_;
};

}  // namespace tokengate

#endif  // TOKENGATE_MANIFEST_HPP_
