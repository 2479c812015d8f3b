/*!
 * Copyright (c) 2026 by Contributors
 * \file tokengate/automaton.hpp
 * \brief Byte-level incremental constraint automaton and its matcher state.
 *
 * The automaton is a pushdown machine over compiled schema nodes: containers
 * (objects, arrays) push frames, leaf nodes (literals, numbers, strings)
 * consume bytes within a frame. Alternatives fork parallel threads; a state
 * is alive while at least one thread survives.
 */
#ifndef TOKENGATE_AUTOMATON_HPP_
#define TOKENGATE_AUTOMATON_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tokengate/regex.hpp"

namespace tokengate {

using CNodeId = uint32_t;

struct CompiledNode {
  enum class Kind : uint8_t { Union, Never, Literal, Integer, Number, String, Object, Array };
  Kind kind = Kind::Never;

  // Union
  std::vector<CNodeId> branches;

  // Literal: exact canonical bytes of one JSON value
  std::string literal;

  // Integer bounds (inclusive, already folded from exclusive forms)
  std::optional<int64_t> int_min, int_max;

  // String
  uint32_t min_len = 0;
  uint32_t max_len = UINT32_MAX;
  std::vector<std::shared_ptr<const ByteNfa>> patterns;   // containment machines
  std::vector<std::shared_ptr<const ByteNfa>> formats;    // anchored machines

  // Object
  struct Property {
    std::string name;  // decoded bytes
    CNodeId schema = 0;
    bool required = false;
  };
  std::vector<Property> properties;
  enum class Additional : uint8_t { Forbidden, Any, Schema };
  Additional additional = Additional::Any;
  CNodeId additional_schema = 0;
  uint32_t min_properties = 0;
  uint32_t max_properties = UINT32_MAX;

  // Array
  std::vector<CNodeId> prefix_items;
  std::optional<CNodeId> tail_item;  // nullopt with tail_forbidden=false means any
  bool tail_forbidden = false;
  uint32_t min_items = 0;
  uint32_t max_items = UINT32_MAX;

  // Key-matching trie over property names (built at compile time).
  struct TrieNode {
    std::vector<std::pair<uint8_t, uint32_t>> edges;
    int32_t terminal = -1;  // property index
  };
  std::vector<TrieNode> key_trie;
};

class ConstraintAutomaton {
 public:
  std::vector<CompiledNode> nodes;
  CNodeId root = 0;
  CNodeId any_root = 0;            // entry of the universal-value subgraph
  std::string compiled_from;       // schema source_id
  double compile_seconds = 0.0;
  uint32_t default_max_depth = 64;

  const CompiledNode& node(CNodeId id) const { return nodes[id]; }
  // Deterministic text listing of nodes and edges, for golden tests.
  std::string debug_dump() const;
};

// ---------------------------------------------------------------------------
// Matcher
// ---------------------------------------------------------------------------

// Incremental JSON string reader: decodes escapes and surrogate pairs into
// the same byte stream the document parser produces.
struct StringReader {
  enum class Stage : uint8_t { Body, Escape, Hex, Closed, Dead };
  Stage stage = Stage::Body;
  uint8_t hex_left = 0;
  uint32_t hex_value = 0;
  uint32_t pending_high = 0;  // buffered high surrogate, 0 if none

  struct Decoded {
    uint8_t bytes[8];
    uint8_t len = 0;
    uint8_t char_begins = 0;  // how many code points begin in this batch
    bool closed = false;
    bool dead = false;
  };
  // Feeds one raw byte, producing decoded content bytes.
  Decoded feed(uint8_t byte);
};

struct IntLexState {
  bool negative = false;
  bool any_digit = false;
  bool leading_zero = false;
  bool saturated = false;
  uint64_t magnitude = 0;
};

enum class NumLexState : uint8_t {
  Start, AfterSign, IntZero, IntDigits, Dot, Frac, ExpMark, ExpSign, ExpDigits
};

struct Frame {
  enum class Kind : uint8_t { Root, Object, Array, Literal, Integer, Number, String };
  // Object phases double for Array and Root where noted.
  enum class Phase : uint8_t {
    ExpectValue,   // Root before start; Object after ':'; Array after ','
    AwaitChild,    // a child frame is active above us
    AfterValue,    // Object/Array: expect ',' or closer; Root: done
    AfterOpen,     // Object: expect key or '}'; Array: expect value or ']'
    ExpectKey,     // Object after ',': a key is mandatory
    InKey,         // Object: reading a key
    AfterKey,      // Object: expect ':'
  };

  Kind kind;
  Phase phase = Phase::ExpectValue;
  CNodeId node = 0;

  // Object
  std::vector<uint64_t> seen;     // property bitset
  uint32_t member_count = 0;
  uint32_t trie_pos = 0;
  bool trie_alive = false;
  bool generic_alive = false;
  int32_t pending_property = -1;  // resolved at key close; -2 = generic
  StringReader reader;            // key or string content reader

  // Array
  uint32_t item_count = 0;

  // Literal
  uint32_t literal_pos = 0;

  // Integer / Number leaf
  IntLexState int_state;
  NumLexState num_state = NumLexState::Start;

  // String leaf consumers
  uint32_t char_count = 0;
  std::vector<NfaSet> nfa_sets;  // patterns then formats, in node order

  bool operator==(const Frame& other) const;
};

struct Thread {
  std::vector<Frame> frames;
  bool operator==(const Thread& other) const { return frames == other.frames; }
};

/*!
 * \brief Matcher position: a set of parallel threads.
 *
 * Value type: copying a state forks an independent matcher. `walk_mode`
 * states accept inter-token whitespace (for walking externally serialized
 * instances); generation states do not, keeping emission compact.
 */
struct MatcherState {
  bool walk_mode = true;
  uint32_t max_depth = 64;
  uint64_t bytes_consumed = 0;
  bool depth_exceeded = false;  // latched when rejection came from depth
  std::vector<Thread> threads;

  bool alive() const { return !threads.empty(); }
};

enum class StepResult : uint8_t { Advanced, Rejected, DepthExceeded };

MatcherState start_state(const ConstraintAutomaton& a, bool walk_mode = true,
                         uint32_t max_depth = 0 /* 0 = automaton default */);

// Advances the state by one byte in place. Rejection is terminal: the state
// keeps no threads and every further byte rejects.
StepResult advance_byte(const ConstraintAutomaton& a, MatcherState& s, uint8_t byte);

// True iff the bytes consumed so far form a complete instance (stack would
// unwind to a finished root).
bool can_terminate(const ConstraintAutomaton& a, const MatcherState& s);

}  // namespace tokengate

#endif  // TOKENGATE_AUTOMATON_HPP_
