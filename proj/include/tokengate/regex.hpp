/*!
 * Copyright (c) 2026 by Contributors
 * \file tokengate/regex.hpp
 * \brief Regex subset compiled to byte-level NFAs for incremental matching.
 */
#ifndef TOKENGATE_REGEX_HPP_
#define TOKENGATE_REGEX_HPP_

#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tokengate {

class RegexError : public std::runtime_error {
 public:
  explicit RegexError(const std::string& msg) : std::runtime_error(msg) {}
};

/*!
 * \brief Byte-level NFA with epsilon edges.
 *
 * Matching advances a set of states one byte at a time, so the matcher is
 * incremental and deterministic in the state-set. Per-state shortest
 * distance to acceptance (in bytes) is precomputed for liveness checks.
 */
class ByteNfa {
 public:
  static constexpr uint32_t kUnreachable = std::numeric_limits<uint32_t>::max();

  struct Edge {
    uint8_t lo, hi;
    uint32_t target;
  };
  struct State {
    std::vector<Edge> edges;
    std::vector<uint32_t> eps;
    bool accepting = false;
  };

  uint32_t add_state();
  void add_edge(uint32_t from, uint8_t lo, uint8_t hi, uint32_t to);
  void add_eps(uint32_t from, uint32_t to);
  void set_accepting(uint32_t s) { states_[s].accepting = true; }
  void set_start(uint32_t s) { start_ = s; }

  size_t size() const { return states_.size(); }
  uint32_t start() const { return start_; }
  const State& state(uint32_t i) const { return states_[i]; }
  uint32_t dist_to_accept(uint32_t i) const { return dist_[i]; }

  // Must be called once construction is complete.
  void finalize();

 private:
  std::vector<State> states_;
  uint32_t start_ = 0;
  std::vector<uint32_t> dist_;
};

/*!
 * \brief Epsilon-closed set of NFA states; the incremental matcher position.
 */
class NfaSet {
 public:
  NfaSet() = default;
  static NfaSet initial(const ByteNfa& nfa);

  // Feed one byte; the set becomes empty when the match is dead.
  void advance(const ByteNfa& nfa, uint8_t byte);

  bool empty() const;
  bool accepting(const ByteNfa& nfa) const;
  // Minimum bytes needed to reach acceptance from here (kUnreachable if dead).
  uint32_t min_dist_to_accept(const ByteNfa& nfa) const;

  bool operator==(const NfaSet& other) const { return blocks_ == other.blocks_; }

  size_t hash() const;

 private:
  std::vector<uint64_t> blocks_;
  void insert(uint32_t s);
  bool contains(uint32_t s) const;
  void close(const ByteNfa& nfa);
  friend class ByteNfa;
};

struct RegexOptions {
  // Containment: the pattern may match any substring (JSON Schema `pattern`).
  // Anchored: the pattern must match the entire subject (format machines).
  bool containment = true;
  size_t max_states = 20000;
};

// Compiles a regex to a byte NFA. Throws RegexError for syntax errors and for
// unsupported constructs (backreferences, lookaround, interior anchors).
std::shared_ptr<const ByteNfa> compile_regex(std::string_view pattern, const RegexOptions& opts);

// Convenience: full-subject match of `text` against a compiled NFA.
bool regex_matches(const ByteNfa& nfa, std::string_view text);

}  // namespace tokengate

#endif  // TOKENGATE_REGEX_HPP_
