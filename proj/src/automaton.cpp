/*!
 * Copyright (c) 2026 by Contributors
 * \file src/automaton.cpp
 * \brief Incremental byte matcher over compiled schema nodes.
 */
#include "tokengate/automaton.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace tokengate {

// ---------------------------------------------------------------------------
// StringReader
// ---------------------------------------------------------------------------

namespace {

void append_cp(StringReader::Decoded& d, uint32_t cp) {
  ++d.char_begins;
  auto put = [&](uint8_t b) { d.bytes[d.len++] = b; };
  if (cp < 0x80) {
    put(static_cast<uint8_t>(cp));
  } else if (cp < 0x800) {
    put(static_cast<uint8_t>(0xC0 | (cp >> 6)));
    put(static_cast<uint8_t>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    put(static_cast<uint8_t>(0xE0 | (cp >> 12)));
    put(static_cast<uint8_t>(0x80 | ((cp >> 6) & 0x3F)));
    put(static_cast<uint8_t>(0x80 | (cp & 0x3F)));
  } else {
    put(static_cast<uint8_t>(0xF0 | (cp >> 18)));
    put(static_cast<uint8_t>(0x80 | ((cp >> 12) & 0x3F)));
    put(static_cast<uint8_t>(0x80 | ((cp >> 6) & 0x3F)));
    put(static_cast<uint8_t>(0x80 | (cp & 0x3F)));
  }
}

int hex_digit(uint8_t b) {
  if (b >= '0' && b <= '9') return b - '0';
  if (b >= 'a' && b <= 'f') return b - 'a' + 10;
  if (b >= 'A' && b <= 'F') return b - 'A' + 10;
  return -1;
}

}  // namespace

StringReader::Decoded StringReader::feed(uint8_t byte) {
  Decoded d;
  auto flush_pending = [&]() {
    if (pending_high) {
      pending_high = 0;
      append_cp(d, 0xFFFD);
    }
  };
  switch (stage) {
    case Stage::Closed:
    case Stage::Dead:
      d.dead = true;
      return d;
    case Stage::Body:
      if (byte == '"') {
        flush_pending();
        d.closed = true;
        stage = Stage::Closed;
        return d;
      }
      if (byte == '\\') {
        stage = Stage::Escape;
        return d;
      }
      if (byte < 0x20) {
        stage = Stage::Dead;
        d.dead = true;
        return d;
      }
      flush_pending();
      d.bytes[d.len++] = byte;
      if ((byte & 0xC0) != 0x80) ++d.char_begins;
      return d;
    case Stage::Escape: {
      stage = Stage::Body;
      switch (byte) {
        case '"': flush_pending(); d.bytes[d.len++] = '"'; ++d.char_begins; return d;
        case '\\': flush_pending(); d.bytes[d.len++] = '\\'; ++d.char_begins; return d;
        case '/': flush_pending(); d.bytes[d.len++] = '/'; ++d.char_begins; return d;
        case 'b': flush_pending(); d.bytes[d.len++] = '\b'; ++d.char_begins; return d;
        case 'f': flush_pending(); d.bytes[d.len++] = '\f'; ++d.char_begins; return d;
        case 'n': flush_pending(); d.bytes[d.len++] = '\n'; ++d.char_begins; return d;
        case 'r': flush_pending(); d.bytes[d.len++] = '\r'; ++d.char_begins; return d;
        case 't': flush_pending(); d.bytes[d.len++] = '\t'; ++d.char_begins; return d;
        case 'u':
          stage = Stage::Hex;
          hex_left = 4;
          hex_value = 0;
          return d;
        default:
          stage = Stage::Dead;
          d.dead = true;
          return d;
      }
    }
    case Stage::Hex: {
      int h = hex_digit(byte);
      if (h < 0) {
        stage = Stage::Dead;
        d.dead = true;
        return d;
      }
      hex_value = (hex_value << 4) | static_cast<uint32_t>(h);
      if (--hex_left > 0) return d;
      stage = Stage::Body;
      uint32_t cp = hex_value;
      if (pending_high) {
        if (cp >= 0xDC00 && cp <= 0xDFFF) {
          uint32_t combined = 0x10000 + ((pending_high - 0xD800) << 10) + (cp - 0xDC00);
          pending_high = 0;
          append_cp(d, combined);
          return d;
        }
        pending_high = 0;
        append_cp(d, 0xFFFD);
      }
      if (cp >= 0xD800 && cp <= 0xDBFF) {
        pending_high = cp;
      } else if (cp >= 0xDC00 && cp <= 0xDFFF) {
        append_cp(d, 0xFFFD);
      } else {
        append_cp(d, cp);
      }
      return d;
    }
  }
  d.dead = true;
  return d;
}

// ---------------------------------------------------------------------------
// Integer lexing under optional int64 bounds
// ---------------------------------------------------------------------------

namespace {

using int128 = __int128;

constexpr uint64_t kSatThreshold = 2000000000000000000ULL;  // > int64 max / 4

bool in_bounds(int128 v, const std::optional<int64_t>& lo, const std::optional<int64_t>& hi) {
  if (lo && v < static_cast<int128>(*lo)) return false;
  if (hi && v > static_cast<int128>(*hi)) return false;
  return true;
}

bool int_accepts(const IntLexState& st, const std::optional<int64_t>& lo,
                 const std::optional<int64_t>& hi) {
  if (!st.any_digit) return false;
  if (st.saturated) return st.negative ? !lo.has_value() : !hi.has_value();
  int128 v = static_cast<int128>(st.magnitude);
  if (st.negative) v = -v;
  return in_bounds(v, lo, hi);
}

// True iff the standing value or some digit extension can satisfy the bounds.
bool int_feasible(const IntLexState& st, const std::optional<int64_t>& lo,
                  const std::optional<int64_t>& hi) {
  if (!lo && !hi) return true;
  if (!st.any_digit) {
    if (!st.negative) return true;  // every integer still reachable
    // reachable values are exactly v <= 0 (via "-0" or -digits)
    int128 upper = 0;
    if (hi && static_cast<int128>(*hi) < upper) upper = *hi;
    return !lo || static_cast<int128>(*lo) <= upper;
  }
  if (int_accepts(st, lo, hi)) return true;
  if (st.saturated) return st.negative ? !lo.has_value() : !hi.has_value();
  if (st.leading_zero) return false;  // "0" / "-0" cannot be extended
  int128 m = static_cast<int128>(st.magnitude);
  int128 p = 1;
  for (int k = 1; k <= 20; ++k) {
    p *= 10;
    int128 ext_lo = m * p;              // appending k digits
    int128 ext_hi = m * p + (p - 1);
    if (st.negative) {
      int128 a = -ext_hi, b = -ext_lo;  // interval [a, b]
      if ((!lo || b >= static_cast<int128>(*lo)) && (!hi || a <= static_cast<int128>(*hi)))
        return true;
      if (lo && b < static_cast<int128>(*lo)) return false;  // only sinks further
    } else {
      if ((!lo || ext_hi >= static_cast<int128>(*lo)) && (!hi || ext_lo <= static_cast<int128>(*hi)))
        return true;
      if (hi && ext_lo > static_cast<int128>(*hi)) return false;  // only grows further
    }
  }
  return !(st.negative ? lo.has_value() : hi.has_value());
}

// Tries to extend the lexeme with one byte. Returns false when the byte can
// never be part of the integer (the caller then finishes the value).
bool int_consume(IntLexState& st, uint8_t b) {
  if (b == '-') {
    if (st.negative || st.any_digit) return false;
    st.negative = true;
    return true;
  }
  if (b < '0' || b > '9') return false;
  uint32_t d = b - '0';
  if (!st.any_digit) {
    st.any_digit = true;
    st.magnitude = d;
    st.leading_zero = d == 0;
    return true;
  }
  if (st.leading_zero) return false;
  if (st.saturated) return true;
  if (st.magnitude > kSatThreshold) {
    st.saturated = true;
    return true;
  }
  st.magnitude = st.magnitude * 10 + d;
  return true;
}

// ---------------------------------------------------------------------------
// Number lexing (full JSON number grammar)
// ---------------------------------------------------------------------------

bool num_accepts(NumLexState st) {
  return st == NumLexState::IntZero || st == NumLexState::IntDigits ||
         st == NumLexState::Frac || st == NumLexState::ExpDigits;
}

bool num_consume(NumLexState& st, uint8_t b) {
  bool digit = b >= '0' && b <= '9';
  switch (st) {
    case NumLexState::Start:
      if (b == '-') { st = NumLexState::AfterSign; return true; }
      if (b == '0') { st = NumLexState::IntZero; return true; }
      if (digit) { st = NumLexState::IntDigits; return true; }
      return false;
    case NumLexState::AfterSign:
      if (b == '0') { st = NumLexState::IntZero; return true; }
      if (digit) { st = NumLexState::IntDigits; return true; }
      return false;
    case NumLexState::IntZero:
      if (b == '.') { st = NumLexState::Dot; return true; }
      if (b == 'e' || b == 'E') { st = NumLexState::ExpMark; return true; }
      return false;
    case NumLexState::IntDigits:
      if (digit) return true;
      if (b == '.') { st = NumLexState::Dot; return true; }
      if (b == 'e' || b == 'E') { st = NumLexState::ExpMark; return true; }
      return false;
    case NumLexState::Dot:
      if (digit) { st = NumLexState::Frac; return true; }
      return false;
    case NumLexState::Frac:
      if (digit) return true;
      if (b == 'e' || b == 'E') { st = NumLexState::ExpMark; return true; }
      return false;
    case NumLexState::ExpMark:
      if (b == '+' || b == '-') { st = NumLexState::ExpSign; return true; }
      if (digit) { st = NumLexState::ExpDigits; return true; }
      return false;
    case NumLexState::ExpSign:
      if (digit) { st = NumLexState::ExpDigits; return true; }
      return false;
    case NumLexState::ExpDigits:
      return digit;
  }
  return false;
}

bool is_json_ws(uint8_t b) { return b == ' ' || b == '\t' || b == '\n' || b == '\r'; }

}  // namespace

// ---------------------------------------------------------------------------
// Frame equality (for thread dedup)
// ---------------------------------------------------------------------------

bool Frame::operator==(const Frame& other) const {
  if (kind != other.kind || phase != other.phase || node != other.node) return false;
  switch (kind) {
    case Kind::Root: return true;
    case Kind::Object:
      return seen == other.seen && member_count == other.member_count &&
             trie_pos == other.trie_pos && trie_alive == other.trie_alive &&
             generic_alive == other.generic_alive && pending_property == other.pending_property &&
             reader.stage == other.reader.stage && reader.hex_left == other.reader.hex_left &&
             reader.hex_value == other.reader.hex_value &&
             reader.pending_high == other.reader.pending_high;
    case Kind::Array: return item_count == other.item_count;
    case Kind::Literal: return literal_pos == other.literal_pos;
    case Kind::Integer:
      return int_state.negative == other.int_state.negative &&
             int_state.any_digit == other.int_state.any_digit &&
             int_state.leading_zero == other.int_state.leading_zero &&
             int_state.saturated == other.int_state.saturated &&
             int_state.magnitude == other.int_state.magnitude;
    case Kind::Number: return num_state == other.num_state;
    case Kind::String:
      return char_count == other.char_count && nfa_sets == other.nfa_sets &&
             reader.stage == other.reader.stage && reader.hex_left == other.reader.hex_left &&
             reader.hex_value == other.reader.hex_value &&
             reader.pending_high == other.reader.pending_high;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Matcher internals
// ---------------------------------------------------------------------------

namespace {

bool seen_bit(const std::vector<uint64_t>& seen, size_t i) {
  return (seen[i >> 6] >> (i & 63)) & 1;
}

void set_seen_bit(std::vector<uint64_t>& seen, size_t i) { seen[i >> 6] |= uint64_t(1) << (i & 63); }

uint32_t required_unseen_count(const CompiledNode& node, const std::vector<uint64_t>& seen) {
  uint32_t n = 0;
  for (size_t i = 0; i < node.properties.size(); ++i)
    if (node.properties[i].required && !seen_bit(seen, i)) ++n;
  return n;
}

bool node_is_never(const ConstraintAutomaton& a, CNodeId id) {
  return a.node(id).kind == CompiledNode::Kind::Never;
}

// Does the key trie below `pos` reach a property that is still legal to pick?
// `only_required` restricts to unseen required properties (when the member
// budget is exactly the required backlog).
bool trie_has_viable(const ConstraintAutomaton& a, const CompiledNode& node, uint32_t pos,
                     const std::vector<uint64_t>& seen, bool only_required) {
  const auto& trie = node.key_trie;
  std::vector<uint32_t> stack = {pos};
  while (!stack.empty()) {
    uint32_t t = stack.back();
    stack.pop_back();
    int32_t term = trie[t].terminal;
    if (term >= 0 && !seen_bit(seen, static_cast<size_t>(term)) &&
        !node_is_never(a, node.properties[static_cast<size_t>(term)].schema) &&
        (!only_required || node.properties[static_cast<size_t>(term)].required))
      return true;
    for (const auto& [b, child] : trie[t].edges) stack.push_back(child);
  }
  return false;
}

struct Stepper {
  const ConstraintAutomaton& a;
  bool walk_mode;
  uint32_t max_depth;
  std::vector<Thread>* out;
  bool* depth_hit;

  void emit(Thread&& t) { out->push_back(std::move(t)); }

  // Expands union nodes to concrete alternatives; a visited set drops
  // self-referential branches (least-fixed-point semantics).
  void expand(CNodeId id, std::vector<CNodeId>& concrete, std::vector<CNodeId>& visited) const {
    if (std::find(visited.begin(), visited.end(), id) != visited.end()) return;
    visited.push_back(id);
    const CompiledNode& n = a.node(id);
    if (n.kind == CompiledNode::Kind::Never) return;
    if (n.kind == CompiledNode::Kind::Union) {
      for (CNodeId b : n.branches) expand(b, concrete, visited);
      return;
    }
    concrete.push_back(id);
  }

  // Starts a value of schema `target` with first byte `byte`. The thread's
  // top frame must already be in AwaitChild phase. Emits surviving forks.
  void start_value(const Thread& base, CNodeId target, uint8_t byte) {
    std::vector<CNodeId> concrete, visited;
    expand(target, concrete, visited);
    for (CNodeId id : concrete) {
      const CompiledNode& n = a.node(id);
      if (base.frames.size() >= max_depth) {
        *depth_hit = true;
        continue;
      }
      Thread fork = base;
      Frame f;
      f.node = id;
      switch (n.kind) {
        case CompiledNode::Kind::Literal: {
          if (n.literal.empty() || static_cast<uint8_t>(n.literal[0]) != byte) continue;
          if (n.literal.size() == 1) {
            finish_child(std::move(fork));
            continue;
          }
          f.kind = Frame::Kind::Literal;
          f.literal_pos = 1;
          break;
        }
        case CompiledNode::Kind::Integer: {
          f.kind = Frame::Kind::Integer;
          if (!int_consume(f.int_state, byte)) continue;
          if (!int_feasible(f.int_state, n.int_min, n.int_max)) continue;
          break;
        }
        case CompiledNode::Kind::Number: {
          f.kind = Frame::Kind::Number;
          if (!num_consume(f.num_state, byte)) continue;
          break;
        }
        case CompiledNode::Kind::String: {
          if (byte != '"') continue;
          f.kind = Frame::Kind::String;
          for (const auto& nfa : n.patterns) f.nfa_sets.push_back(NfaSet::initial(*nfa));
          for (const auto& nfa : n.formats) f.nfa_sets.push_back(NfaSet::initial(*nfa));
          if (n.max_len == 0) {
            // only the empty string can close; consumers untouched
          }
          break;
        }
        case CompiledNode::Kind::Object: {
          if (byte != '{') continue;
          f.kind = Frame::Kind::Object;
          f.phase = Frame::Phase::AfterOpen;
          f.seen.assign((n.properties.size() + 63) / 64, 0);
          break;
        }
        case CompiledNode::Kind::Array: {
          if (byte != '[') continue;
          f.kind = Frame::Kind::Array;
          f.phase = Frame::Phase::AfterOpen;
          break;
        }
        case CompiledNode::Kind::Union:
        case CompiledNode::Kind::Never:
          continue;  // unreachable after expand()
      }
      fork.frames.push_back(std::move(f));
      emit(std::move(fork));
    }
  }

  // Pops the finished child value; the byte (if any) was already consumed.
  void finish_child(Thread&& t) {
    Frame& parent = t.frames.back();
    // parent phase AwaitChild (or Root ExpectValue before first push)
    parent.phase = Frame::Phase::AfterValue;
    emit(std::move(t));
  }

  // Pops the top frame and re-dispatches `byte` to the parent.
  void pop_and_retry(Thread&& t, uint8_t byte) {
    t.frames.pop_back();
    t.frames.back().phase = Frame::Phase::AfterValue;
    step(std::move(t), byte);
  }

  // Advances one thread by one byte, emitting surviving forks.
  void step(Thread&& t, uint8_t byte) {
    Frame& top = t.frames.back();
    switch (top.kind) {
      case Frame::Kind::Root: {
        if (top.phase == Frame::Phase::ExpectValue) {
          if (is_json_ws(byte)) {
            if (walk_mode) emit(std::move(t));
            return;
          }
          top.phase = Frame::Phase::AwaitChild;
          start_value(t, a.root, byte);
          return;
        }
        // AfterValue: complete document; only trailing whitespace in walk mode
        if (top.phase == Frame::Phase::AfterValue && walk_mode && is_json_ws(byte)) {
          emit(std::move(t));
        }
        return;
      }

      case Frame::Kind::Literal: {
        const CompiledNode& n = a.node(top.node);
        if (top.literal_pos < n.literal.size() &&
            static_cast<uint8_t>(n.literal[top.literal_pos]) == byte) {
          if (++top.literal_pos == n.literal.size()) {
            t.frames.pop_back();
            finish_child(std::move(t));
          } else {
            emit(std::move(t));
          }
        }
        return;
      }

      case Frame::Kind::Integer: {
        const CompiledNode& n = a.node(top.node);
        IntLexState next = top.int_state;
        if (int_consume(next, byte)) {
          if (!int_feasible(next, n.int_min, n.int_max)) return;
          top.int_state = next;
          emit(std::move(t));
          return;
        }
        if (!int_accepts(top.int_state, n.int_min, n.int_max)) return;
        pop_and_retry(std::move(t), byte);
        return;
      }

      case Frame::Kind::Number: {
        NumLexState next = top.num_state;
        if (num_consume(next, byte)) {
          top.num_state = next;
          emit(std::move(t));
          return;
        }
        if (!num_accepts(top.num_state)) return;
        pop_and_retry(std::move(t), byte);
        return;
      }

      case Frame::Kind::String: {
        const CompiledNode& n = a.node(top.node);
        StringReader::Decoded d = top.reader.feed(byte);
        if (d.dead) return;
        if (d.len > 0) {
          top.char_count += d.char_begins;
          if (top.char_count > n.max_len) return;
          size_t npat = n.patterns.size();
          for (size_t i = 0; i < top.nfa_sets.size(); ++i) {
            const ByteNfa& nfa = i < npat ? *n.patterns[i] : *n.formats[i - npat];
            for (uint8_t k = 0; k < d.len; ++k) top.nfa_sets[i].advance(nfa, d.bytes[k]);
            if (top.nfa_sets[i].empty()) return;  // anchored machine died
          }
        }
        if (d.closed) {
          if (top.char_count < n.min_len) return;
          size_t npat = n.patterns.size();
          for (size_t i = 0; i < top.nfa_sets.size(); ++i) {
            const ByteNfa& nfa = i < npat ? *n.patterns[i] : *n.formats[i - npat];
            if (!top.nfa_sets[i].accepting(nfa)) return;
          }
          t.frames.pop_back();
          finish_child(std::move(t));
          return;
        }
        emit(std::move(t));
        return;
      }

      case Frame::Kind::Array: {
        const CompiledNode& n = a.node(top.node);
        // item_count = completed items; in AfterValue one more just finished.
        auto item_schema = [&](uint32_t index) -> CNodeId {
          return index < n.prefix_items.size()
                     ? n.prefix_items[index]
                     : (n.tail_item ? *n.tail_item : any_node());
        };
        auto may_start_item = [&](uint32_t index) {
          if (index >= n.max_items) return false;
          if (n.tail_forbidden && index >= n.prefix_items.size()) return false;
          return true;
        };
        switch (top.phase) {
          case Frame::Phase::AfterOpen: {
            if (is_json_ws(byte)) {
              if (walk_mode) emit(std::move(t));
              return;
            }
            if (byte == ']') {
              if (n.min_items > 0) return;
              t.frames.pop_back();
              finish_child(std::move(t));
              return;
            }
            if (!may_start_item(0)) return;
            top.phase = Frame::Phase::AwaitChild;
            start_value(t, item_schema(0), byte);
            return;
          }
          case Frame::Phase::ExpectValue: {
            if (is_json_ws(byte)) {
              if (walk_mode) emit(std::move(t));
              return;
            }
            if (!may_start_item(top.item_count)) return;
            top.phase = Frame::Phase::AwaitChild;
            start_value(t, item_schema(top.item_count), byte);
            return;
          }
          case Frame::Phase::AfterValue: {
            if (is_json_ws(byte)) {
              if (walk_mode) emit(std::move(t));
              return;
            }
            if (byte == ',') {
              uint32_t next_index = top.item_count + 1;
              if (!may_start_item(next_index)) return;
              top.item_count = next_index;
              top.phase = Frame::Phase::ExpectValue;
              emit(std::move(t));
              return;
            }
            if (byte == ']') {
              ++top.item_count;  // count the value that just finished
              if (top.item_count < n.min_items) return;
              t.frames.pop_back();
              finish_child(std::move(t));
              return;
            }
            return;
          }
          default: return;
        }
      }

      case Frame::Kind::Object: {
        const CompiledNode& n = a.node(top.node);
        // When the remaining member budget equals the required backlog, only
        // unseen required properties may be picked.
        auto required_only_now = [&]() {
          if (n.max_properties == UINT32_MAX) return false;
          uint32_t avail = n.max_properties - top.member_count;
          return avail == required_unseen_count(n, top.seen);
        };
        auto start_key = [&]() -> bool {
          if (top.member_count >= n.max_properties) return false;
          bool required_only = required_only_now();
          top.reader = StringReader{};
          top.trie_pos = 0;
          top.trie_alive = !n.key_trie.empty();
          top.generic_alive =
              n.additional != CompiledNode::Additional::Forbidden && !required_only;
          top.pending_property = -1;
          bool viable_named =
              top.trie_alive && trie_has_viable(a, n, 0, top.seen, required_only);
          return top.generic_alive || viable_named;
        };
        switch (top.phase) {
          case Frame::Phase::AfterOpen:
          case Frame::Phase::ExpectKey: {
            if (is_json_ws(byte)) {
              if (walk_mode) emit(std::move(t));
              return;
            }
            if (byte == '}' && top.phase == Frame::Phase::AfterOpen) {
              if (top.member_count < n.min_properties) return;
              if (required_unseen_count(n, top.seen) > 0) return;
              t.frames.pop_back();
              finish_child(std::move(t));
              return;
            }
            if (byte == '"') {
              if (!start_key()) return;
              top.phase = Frame::Phase::InKey;
              emit(std::move(t));
              return;
            }
            return;
          }
          case Frame::Phase::InKey: {
            StringReader::Decoded d = top.reader.feed(byte);
            if (d.dead) return;
            bool required_only = required_only_now();
            for (uint8_t k = 0; k < d.len && top.trie_alive; ++k) {
              uint8_t b = d.bytes[k];
              bool moved = false;
              for (const auto& [eb, child] : n.key_trie[top.trie_pos].edges) {
                if (eb == b) {
                  top.trie_pos = child;
                  moved = true;
                  break;
                }
              }
              if (!moved) top.trie_alive = false;
            }
            if (d.closed) {
              int32_t term = top.trie_alive ? n.key_trie[top.trie_pos].terminal : -1;
              if (term >= 0) {
                size_t pi = static_cast<size_t>(term);
                if (seen_bit(top.seen, pi)) return;  // duplicate key
                if (node_is_never(a, n.properties[pi].schema)) return;
                if (!n.properties[pi].required && required_only) return;
                top.pending_property = term;
              } else {
                if (!top.generic_alive) return;
                top.pending_property = -2;
              }
              top.phase = Frame::Phase::AfterKey;
              emit(std::move(t));
              return;
            }
            // mid-key liveness: some completion must remain possible
            if (!top.generic_alive) {
              if (!top.trie_alive ||
                  !trie_has_viable(a, n, top.trie_pos, top.seen, required_only))
                return;
            }
            emit(std::move(t));
            return;
          }
          case Frame::Phase::AfterKey: {
            if (is_json_ws(byte)) {
              if (walk_mode) emit(std::move(t));
              return;
            }
            if (byte != ':') return;
            top.phase = Frame::Phase::ExpectValue;
            emit(std::move(t));
            return;
          }
          case Frame::Phase::ExpectValue: {
            if (is_json_ws(byte)) {
              if (walk_mode) emit(std::move(t));
              return;
            }
            CNodeId target;
            if (top.pending_property >= 0) {
              size_t pi = static_cast<size_t>(top.pending_property);
              target = n.properties[pi].schema;
              set_seen_bit(top.seen, pi);
            } else {
              target = n.additional == CompiledNode::Additional::Schema ? n.additional_schema
                                                                        : any_node();
            }
            ++top.member_count;
            top.phase = Frame::Phase::AwaitChild;
            start_value(t, target, byte);
            return;
          }
          case Frame::Phase::AfterValue: {
            if (is_json_ws(byte)) {
              if (walk_mode) emit(std::move(t));
              return;
            }
            if (byte == ',') {
              // a further key must be possible
              if (top.member_count >= n.max_properties) return;
              bool required_only = required_only_now();
              bool generic =
                  n.additional != CompiledNode::Additional::Forbidden && !required_only;
              if (!generic &&
                  (n.key_trie.empty() || !trie_has_viable(a, n, 0, top.seen, required_only)))
                return;
              top.phase = Frame::Phase::ExpectKey;
              emit(std::move(t));
              return;
            }
            if (byte == '}') {
              if (top.member_count < n.min_properties) return;
              if (required_unseen_count(n, top.seen) > 0) return;
              t.frames.pop_back();
              finish_child(std::move(t));
              return;
            }
            return;
          }
          default: return;
        }
      }
    }
  }

  CNodeId any_node() const { return a.any_root; }
};

}  // namespace

// ---------------------------------------------------------------------------
// Public matcher API
// ---------------------------------------------------------------------------

MatcherState start_state(const ConstraintAutomaton& a, bool walk_mode, uint32_t max_depth) {
  MatcherState s;
  s.walk_mode = walk_mode;
  s.max_depth = max_depth == 0 ? a.default_max_depth : max_depth;
  Thread t;
  Frame root;
  root.kind = Frame::Kind::Root;
  root.phase = Frame::Phase::ExpectValue;
  t.frames.push_back(std::move(root));
  s.threads.push_back(std::move(t));
  return s;
}

StepResult advance_byte(const ConstraintAutomaton& a, MatcherState& s, uint8_t byte) {
  if (s.threads.empty()) return s.depth_exceeded ? StepResult::DepthExceeded : StepResult::Rejected;
  std::vector<Thread> next;
  bool depth_hit = false;
  Stepper stepper{a, s.walk_mode, s.max_depth, &next, &depth_hit};
  for (Thread& t : s.threads) stepper.step(std::move(t), byte);
  // dedup identical threads to bound union fan-out
  std::vector<Thread> unique;
  unique.reserve(next.size());
  for (Thread& t : next) {
    bool dup = false;
    for (const Thread& u : unique)
      if (u == t) {
        dup = true;
        break;
      }
    if (!dup) unique.push_back(std::move(t));
  }
  s.threads = std::move(unique);
  ++s.bytes_consumed;
  if (s.threads.empty()) {
    if (depth_hit) {
      s.depth_exceeded = true;
      return StepResult::DepthExceeded;
    }
    return StepResult::Rejected;
  }
  return StepResult::Advanced;
}

bool can_terminate(const ConstraintAutomaton& a, const MatcherState& s) {
  for (const Thread& t : s.threads) {
    if (t.frames.size() == 1) {
      const Frame& root = t.frames[0];
      if (root.kind == Frame::Kind::Root && root.phase == Frame::Phase::AfterValue) return true;
      continue;
    }
    if (t.frames.size() == 2 && t.frames[0].kind == Frame::Kind::Root) {
      const Frame& top = t.frames[1];
      const CompiledNode& n = a.node(top.node);
      if (top.kind == Frame::Kind::Integer && int_accepts(top.int_state, n.int_min, n.int_max))
        return true;
      if (top.kind == Frame::Kind::Number && num_accepts(top.num_state)) return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Debug dump
// ---------------------------------------------------------------------------

std::string ConstraintAutomaton::debug_dump() const {
  std::ostringstream out;
  out << "automaton source=" << compiled_from << " root=" << root << " any=" << any_root
      << " nodes=" << nodes.size() << "\n";
  for (size_t i = 0; i < nodes.size(); ++i) {
    const CompiledNode& n = nodes[i];
    out << "  n" << i << " ";
    switch (n.kind) {
      case CompiledNode::Kind::Never: out << "never"; break;
      case CompiledNode::Kind::Union: {
        out << "union [";
        for (size_t b = 0; b < n.branches.size(); ++b) out << (b ? " " : "") << "n" << n.branches[b];
        out << "]";
        break;
      }
      case CompiledNode::Kind::Literal: {
        out << "literal \"";
        for (unsigned char c : n.literal) {
          if (c >= 0x20 && c < 0x7F && c != '"' && c != '\\')
            out << c;
          else {
            char buf[8];
            snprintf(buf, sizeof(buf), "\\x%02x", c);
            out << buf;
          }
        }
        out << "\"";
        break;
      }
      case CompiledNode::Kind::Integer:
        out << "integer";
        if (n.int_min) out << " min=" << *n.int_min;
        if (n.int_max) out << " max=" << *n.int_max;
        break;
      case CompiledNode::Kind::Number: out << "number"; break;
      case CompiledNode::Kind::String:
        out << "string";
        if (n.min_len > 0) out << " minlen=" << n.min_len;
        if (n.max_len != UINT32_MAX) out << " maxlen=" << n.max_len;
        if (!n.patterns.empty()) out << " patterns=" << n.patterns.size();
        if (!n.formats.empty()) out << " formats=" << n.formats.size();
        break;
      case CompiledNode::Kind::Object: {
        out << "object props=[";
        for (size_t p = 0; p < n.properties.size(); ++p) {
          if (p) out << " ";
          out << n.properties[p].name << (n.properties[p].required ? "!" : "") << ":n"
              << n.properties[p].schema;
        }
        out << "] additional=";
        switch (n.additional) {
          case CompiledNode::Additional::Forbidden: out << "forbidden"; break;
          case CompiledNode::Additional::Any: out << "any"; break;
          case CompiledNode::Additional::Schema: out << "n" << n.additional_schema; break;
        }
        if (n.min_properties > 0) out << " minprops=" << n.min_properties;
        if (n.max_properties != UINT32_MAX) out << " maxprops=" << n.max_properties;
        break;
      }
      case CompiledNode::Kind::Array: {
        out << "array prefix=[";
        for (size_t p = 0; p < n.prefix_items.size(); ++p)
          out << (p ? " " : "") << "n" << n.prefix_items[p];
        out << "] tail=";
        if (n.tail_forbidden)
          out << "forbidden";
        else if (n.tail_item)
          out << "n" << *n.tail_item;
        else
          out << "any";
        if (n.min_items > 0) out << " minitems=" << n.min_items;
        if (n.max_items != UINT32_MAX) out << " maxitems=" << n.max_items;
        break;
      }
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace tokengate
