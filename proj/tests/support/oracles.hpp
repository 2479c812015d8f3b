// Test-side oracles, implemented independently of the engine under test.
#ifndef TOKENGATE_TEST_ORACLES_HPP_
#define TOKENGATE_TEST_ORACLES_HPP_

#include <optional>
#include <string>
#include <vector>

#include "tokengate/json_value.hpp"

namespace oracles {

// Naive keyword-by-keyword validator over the raw schema document. Follows
// same-document $ref pointers textually; no IR, no caching, std::regex for
// patterns. Deliberately slow and simple.
bool naive_validate(const tokengate::JsonValue& schema_root, const tokengate::JsonValue& schema,
                    const tokengate::JsonValue& instance);
inline bool naive_validate(const tokengate::JsonValue& schema,
                           const tokengate::JsonValue& instance) {
  return naive_validate(schema, schema, instance);
}

// The finite toy universe: booleans, small integers, short strings over a
// three-letter alphabet, arrays/objects of depth <= 2.
std::vector<tokengate::JsonValue> toy_universe();

// Procedural format checks, written before the regex table and kept
// independent of it.
bool check_date(const std::string& s);
bool check_time(const std::string& s);
bool check_date_time(const std::string& s);
bool check_email(const std::string& s);
bool check_uri(const std::string& s);
bool check_uuid(const std::string& s);
bool check_ipv4(const std::string& s);
bool check_ipv6(const std::string& s);

// Median oracle by repeated minimum extraction (no std::sort).
double selection_median_lower(std::vector<double> values);

// Independent map-based trie for node counting.
size_t map_trie_node_count(const std::vector<std::string>& sequences);

// Incremental JSON syntax recognizer used to bound brute-force byte
// enumeration: tracks whether a byte string is still a prefix of some valid
// JSON document. Independent of the constraint automaton.
class JsonPrefixMachine {
 public:
  JsonPrefixMachine();
  // feeds one byte; returns false when no JSON document extends this prefix
  bool feed(uint8_t byte);
  // true when the bytes consumed so far form a complete document
  bool complete() const;
  bool alive() const { return alive_; }

 private:
  enum class S : uint8_t;
  bool alive_ = true;
  std::vector<uint8_t> stack_;  // '{' or '[' markers
  S state_;
  std::string literal_tail_;
  bool in_key_ = false;
  int hex_left_ = 0;
};

}  // namespace oracles

#endif  // TOKENGATE_TEST_ORACLES_HPP_
