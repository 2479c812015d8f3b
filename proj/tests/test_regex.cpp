#include <doctest.h>

#include <random>
#include <regex>

#include "tokengate/regex.hpp"

using namespace tokengate;

namespace {

bool engine_contains(const std::string& pattern, const std::string& text) {
  RegexOptions opts;
  opts.containment = true;
  auto nfa = compile_regex(pattern, opts);
  return regex_matches(*nfa, text);
}

// independent oracle: std::regex ECMAScript search semantics
bool std_contains(const std::string& pattern, const std::string& text) {
  std::regex re(pattern, std::regex::ECMAScript);
  return std::regex_search(text, re);
}

}  // namespace

TEST_CASE("containment matching agrees with std::regex on enumerated strings") {
  const char* patterns[] = {"a+b",   "^a*$",    "(ab|ba)", "a{2,3}", "[ab]*bb",
                            "a.b",   "a|b{2}",  "(a+)+b",  "^ab",    "ab$",
                            "[^a]b", "a?b?a?b", "(?:ab)+", "a[a-b]b"};
  // all strings over {a, b} up to length 5
  std::vector<std::string> subjects = {""};
  for (int len = 1; len <= 5; ++len) {
    size_t start = subjects.size() - (1u << (len - 1));
    std::vector<std::string> extended;
    for (size_t i = 0; i < subjects.size(); ++i) {
      if (subjects[i].size() == static_cast<size_t>(len - 1)) {
        extended.push_back(subjects[i] + "a");
        extended.push_back(subjects[i] + "b");
      }
    }
    (void)start;
    subjects.insert(subjects.end(), extended.begin(), extended.end());
  }
  for (const char* pattern : patterns) {
    for (const auto& text : subjects) {
      CAPTURE(pattern);
      CAPTURE(text);
      CHECK(engine_contains(pattern, text) == std_contains(pattern, text));
    }
  }
}

TEST_CASE("character classes and escapes agree with std::regex") {
  const char* patterns[] = {"\\d+", "\\w+", "[0-9a-f]{2}", "\\s", "[^0-9]+", "x\\.y", "\\\\"};
  const char* subjects[] = {"",    "0",   "42",   "ab",   "3f",  "x.y", "xzy",
                            " \t", "a1b", "\\",   "0x3f", "fff", "a b", "9"};
  for (const char* pattern : patterns) {
    for (const char* text : subjects) {
      CAPTURE(pattern);
      CAPTURE(text);
      CHECK(engine_contains(pattern, text) == std_contains(pattern, text));
    }
  }
}

TEST_CASE("anchors restrict containment") {
  CHECK(engine_contains("^ab$", "ab"));
  CHECK_FALSE(engine_contains("^ab$", "xab"));
  CHECK_FALSE(engine_contains("^ab$", "abx"));
  CHECK(engine_contains("^ab", "abxxx"));
  CHECK_FALSE(engine_contains("^ab", "xxab"));
  CHECK(engine_contains("ab$", "xxab"));
  CHECK_FALSE(engine_contains("ab$", "abxx"));
  CHECK(engine_contains("^$", ""));
  CHECK_FALSE(engine_contains("^$", "a"));
}

TEST_CASE("unsupported constructs are rejected, not miscompiled") {
  RegexOptions opts;
  CHECK_THROWS_AS(compile_regex("(a)\\1", opts), RegexError);
  CHECK_THROWS_AS(compile_regex("a(?=b)", opts), RegexError);
  CHECK_THROWS_AS(compile_regex("a(?!b)", opts), RegexError);
  CHECK_THROWS_AS(compile_regex("\\bword", opts), RegexError);
  CHECK_THROWS_AS(compile_regex("a|^b", opts), RegexError);
  CHECK_THROWS_AS(compile_regex("[a-", opts), RegexError);
  CHECK_THROWS_AS(compile_regex("(a", opts), RegexError);
  CHECK_THROWS_AS(compile_regex("a{5,2}", opts), RegexError);
  CHECK_THROWS_AS(compile_regex("a{100000000}", opts), RegexError);
}

TEST_CASE("utf-8 classes match whole code points") {
  RegexOptions opts;
  opts.containment = false;
  auto nfa = compile_regex("[\\u00e0-\\u00ff]+", opts);
  CHECK(regex_matches(*nfa, "\xc3\xa9"));        // U+00E9
  CHECK_FALSE(regex_matches(*nfa, "\xc3"));      // truncated sequence
  CHECK_FALSE(regex_matches(*nfa, "a"));
  auto any = compile_regex(".", opts);
  CHECK(regex_matches(*any, "a"));
  CHECK(regex_matches(*any, "\xc3\xa9"));
  CHECK(regex_matches(*any, "\xF0\x9F\x98\x80"));  // U+1F600
  CHECK_FALSE(regex_matches(*any, "\n"));
  CHECK_FALSE(regex_matches(*any, "ab"));
  auto neg = compile_regex("[^a]", opts);
  CHECK(regex_matches(*neg, "\xc3\xa9"));
  CHECK_FALSE(regex_matches(*neg, "a"));
}

TEST_CASE("incremental state sets track liveness") {
  RegexOptions opts;
  opts.containment = false;
  auto nfa = compile_regex("ab+c", opts);
  NfaSet set = NfaSet::initial(*nfa);
  CHECK(set.min_dist_to_accept(*nfa) == 3);
  set.advance(*nfa, 'a');
  CHECK_FALSE(set.empty());
  CHECK(set.min_dist_to_accept(*nfa) == 2);
  set.advance(*nfa, 'b');
  CHECK(set.min_dist_to_accept(*nfa) == 1);
  CHECK_FALSE(set.accepting(*nfa));
  set.advance(*nfa, 'c');
  CHECK(set.accepting(*nfa));
  set.advance(*nfa, 'c');
  CHECK(set.empty());
}
