/*!
 * Copyright (c) 2026 by Contributors
 * \file src/regex.cpp
 * \brief Regex parsing, UTF-8 range lowering, Thompson construction.
 */
#include "tokengate/regex.hpp"

#include <algorithm>
#include <deque>
#include <memory>

namespace tokengate {

// ---------------------------------------------------------------------------
// ByteNfa
// ---------------------------------------------------------------------------

uint32_t ByteNfa::add_state() {
  states_.emplace_back();
  return static_cast<uint32_t>(states_.size() - 1);
}

void ByteNfa::add_edge(uint32_t from, uint8_t lo, uint8_t hi, uint32_t to) {
  states_[from].edges.push_back(Edge{lo, hi, to});
}

void ByteNfa::add_eps(uint32_t from, uint32_t to) { states_[from].eps.push_back(to); }

void ByteNfa::finalize() {
  // 0-1 BFS backward from accepting states: eps edges cost 0, byte edges 1.
  size_t n = states_.size();
  std::vector<std::vector<uint32_t>> rev_eps(n);
  std::vector<std::vector<uint32_t>> rev_byte(n);
  for (uint32_t s = 0; s < n; ++s) {
    for (uint32_t t : states_[s].eps) rev_eps[t].push_back(s);
    for (const Edge& e : states_[s].edges) rev_byte[e.target].push_back(s);
  }
  dist_.assign(n, kUnreachable);
  std::deque<uint32_t> dq;
  for (uint32_t s = 0; s < n; ++s) {
    if (states_[s].accepting) {
      dist_[s] = 0;
      dq.push_back(s);
    }
  }
  while (!dq.empty()) {
    uint32_t s = dq.front();
    dq.pop_front();
    for (uint32_t p : rev_eps[s]) {
      if (dist_[p] > dist_[s]) {
        dist_[p] = dist_[s];
        dq.push_front(p);
      }
    }
    for (uint32_t p : rev_byte[s]) {
      if (dist_[s] != kUnreachable && dist_[p] > dist_[s] + 1) {
        dist_[p] = dist_[s] + 1;
        dq.push_back(p);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// NfaSet
// ---------------------------------------------------------------------------

void NfaSet::insert(uint32_t s) {
  size_t block = s >> 6;
  if (blocks_.size() <= block) blocks_.resize(block + 1, 0);
  blocks_[block] |= uint64_t(1) << (s & 63);
}

bool NfaSet::contains(uint32_t s) const {
  size_t block = s >> 6;
  return block < blocks_.size() && (blocks_[block] >> (s & 63)) & 1;
}

void NfaSet::close(const ByteNfa& nfa) {
  std::vector<uint32_t> stack;
  for (size_t b = 0; b < blocks_.size(); ++b) {
    uint64_t bits = blocks_[b];
    while (bits) {
      uint32_t s = static_cast<uint32_t>(b * 64 + __builtin_ctzll(bits));
      bits &= bits - 1;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    uint32_t s = stack.back();
    stack.pop_back();
    for (uint32_t t : nfa.state(s).eps) {
      if (!contains(t)) {
        insert(t);
        stack.push_back(t);
      }
    }
  }
}

NfaSet NfaSet::initial(const ByteNfa& nfa) {
  NfaSet set;
  set.insert(nfa.start());
  set.close(nfa);
  return set;
}

void NfaSet::advance(const ByteNfa& nfa, uint8_t byte) {
  NfaSet next;
  for (size_t b = 0; b < blocks_.size(); ++b) {
    uint64_t bits = blocks_[b];
    while (bits) {
      uint32_t s = static_cast<uint32_t>(b * 64 + __builtin_ctzll(bits));
      bits &= bits - 1;
      for (const ByteNfa::Edge& e : nfa.state(s).edges) {
        if (byte >= e.lo && byte <= e.hi) next.insert(e.target);
      }
    }
  }
  next.close(nfa);
  blocks_ = std::move(next.blocks_);
}

bool NfaSet::empty() const {
  for (uint64_t b : blocks_)
    if (b) return false;
  return true;
}

bool NfaSet::accepting(const ByteNfa& nfa) const {
  for (size_t b = 0; b < blocks_.size(); ++b) {
    uint64_t bits = blocks_[b];
    while (bits) {
      uint32_t s = static_cast<uint32_t>(b * 64 + __builtin_ctzll(bits));
      bits &= bits - 1;
      if (nfa.state(s).accepting) return true;
    }
  }
  return false;
}

uint32_t NfaSet::min_dist_to_accept(const ByteNfa& nfa) const {
  uint32_t best = ByteNfa::kUnreachable;
  for (size_t b = 0; b < blocks_.size(); ++b) {
    uint64_t bits = blocks_[b];
    while (bits) {
      uint32_t s = static_cast<uint32_t>(b * 64 + __builtin_ctzll(bits));
      bits &= bits - 1;
      best = std::min(best, nfa.dist_to_accept(s));
    }
  }
  return best;
}

size_t NfaSet::hash() const {
  size_t h = 0x811c9dc5;
  for (uint64_t b : blocks_) h = (h ^ static_cast<size_t>(b)) * 0x100000001b3ULL;
  return h;
}

// ---------------------------------------------------------------------------
// Regex AST
// ---------------------------------------------------------------------------

namespace {

struct CpRange {
  uint32_t lo, hi;
};

struct Ast;
using AstPtr = std::unique_ptr<Ast>;

struct Ast {
  enum class Kind { Alt, Seq, Repeat, Class, Empty };
  Kind kind;
  std::vector<AstPtr> children;       // Alt, Seq
  AstPtr child;                       // Repeat
  uint32_t rep_min = 0, rep_max = 0;  // Repeat; rep_max == UINT32_MAX means unbounded
  std::vector<CpRange> ranges;        // Class (sorted, merged)
};

AstPtr make_ast(Ast::Kind k) {
  auto a = std::make_unique<Ast>();
  a->kind = k;
  return a;
}

constexpr uint32_t kMaxCp = 0x10FFFF;

std::vector<CpRange> merge_ranges(std::vector<CpRange> rs) {
  std::sort(rs.begin(), rs.end(), [](const CpRange& a, const CpRange& b) { return a.lo < b.lo; });
  std::vector<CpRange> out;
  for (const auto& r : rs) {
    if (r.lo > r.hi) continue;
    if (!out.empty() && r.lo <= out.back().hi + 1 && out.back().hi + 1 != 0)
      out.back().hi = std::max(out.back().hi, r.hi);
    else
      out.push_back(r);
  }
  return out;
}

std::vector<CpRange> complement_ranges(const std::vector<CpRange>& rs) {
  // Complement within [0, 0x10FFFF], always excluding the surrogate block,
  // which has no UTF-8 encoding.
  std::vector<CpRange> out;
  uint32_t cursor = 0;
  for (const auto& r : merge_ranges(rs)) {
    if (r.lo > cursor) out.push_back(CpRange{cursor, r.lo - 1});
    cursor = r.hi + 1;
    if (cursor == 0) break;  // overflow at kMaxCp
  }
  if (cursor <= kMaxCp) out.push_back(CpRange{cursor, kMaxCp});
  // carve out surrogates
  std::vector<CpRange> carved;
  for (const auto& r : out) {
    if (r.hi < 0xD800 || r.lo > 0xDFFF) {
      carved.push_back(r);
      continue;
    }
    if (r.lo < 0xD800) carved.push_back(CpRange{r.lo, 0xD7FF});
    if (r.hi > 0xDFFF) carved.push_back(CpRange{0xE000, r.hi});
  }
  return carved;
}

const std::vector<CpRange>& digit_ranges() {
  static const std::vector<CpRange> r = {{'0', '9'}};
  return r;
}
const std::vector<CpRange>& word_ranges() {
  static const std::vector<CpRange> r = {{'0', '9'}, {'A', 'Z'}, {'_', '_'}, {'a', 'z'}};
  return r;
}
const std::vector<CpRange>& space_ranges() {
  static const std::vector<CpRange> r = {{0x09, 0x0D},     {' ', ' '},       {0xA0, 0xA0},
                                         {0x1680, 0x1680}, {0x2000, 0x200A}, {0x2028, 0x2029},
                                         {0x202F, 0x202F}, {0x205F, 0x205F}, {0x3000, 0x3000},
                                         {0xFEFF, 0xFEFF}};
  return r;
}
const std::vector<CpRange>& dot_ranges() {
  // Any code point except line terminators.
  static const std::vector<CpRange> r =
      complement_ranges({{0x0A, 0x0A}, {0x0D, 0x0D}, {0x2028, 0x2029}});
  return r;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct RegexParser {
  std::string_view text;
  size_t pos = 0;
  bool anchored_head = false;
  bool anchored_tail = false;

  [[noreturn]] void fail(const std::string& msg) {
    throw RegexError(msg + " (at offset " + std::to_string(pos) + ")");
  }

  bool at_end() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  // Decodes one UTF-8 code point from the pattern source.
  uint32_t next_codepoint() {
    unsigned char c = static_cast<unsigned char>(text[pos]);
    if (c < 0x80) {
      ++pos;
      return c;
    }
    int extra = c >= 0xF0 ? 3 : c >= 0xE0 ? 2 : c >= 0xC0 ? 1 : -1;
    if (extra < 0 || pos + extra >= text.size()) fail("bad UTF-8 in pattern");
    uint32_t cp = c & (0x3F >> extra);
    for (int i = 0; i < extra; ++i) {
      unsigned char cc = static_cast<unsigned char>(text[++pos]);
      if ((cc & 0xC0) != 0x80) fail("bad UTF-8 continuation in pattern");
      cp = (cp << 6) | (cc & 0x3F);
    }
    ++pos;
    return cp;
  }

  uint32_t parse_hex(int digits) {
    uint32_t v = 0;
    for (int i = 0; i < digits; ++i) {
      if (at_end()) fail("truncated hex escape");
      char c = text[pos++];
      v <<= 4;
      if (c >= '0' && c <= '9')
        v |= static_cast<uint32_t>(c - '0');
      else if (c >= 'a' && c <= 'f')
        v |= static_cast<uint32_t>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F')
        v |= static_cast<uint32_t>(c - 'A' + 10);
      else
        fail("bad hex escape");
    }
    return v;
  }

  // Returns either a single code point (second=false) or a class (second=true).
  std::pair<uint32_t, bool> parse_escape(std::vector<CpRange>* class_out) {
    if (at_end()) fail("dangling backslash");
    char c = text[pos++];
    switch (c) {
      case 'n': return {'\n', false};
      case 't': return {'\t', false};
      case 'r': return {'\r', false};
      case 'f': return {'\f', false};
      case 'v': return {'\v', false};
      case '0': return {0, false};
      case 'x': return {parse_hex(2), false};
      case 'u': {
        if (!at_end() && peek() == '{') {
          ++pos;
          uint32_t v = 0;
          int n = 0;
          while (!at_end() && peek() != '}') {
            char h = text[pos++];
            v <<= 4;
            if (h >= '0' && h <= '9')
              v |= static_cast<uint32_t>(h - '0');
            else if (h >= 'a' && h <= 'f')
              v |= static_cast<uint32_t>(h - 'a' + 10);
            else if (h >= 'A' && h <= 'F')
              v |= static_cast<uint32_t>(h - 'A' + 10);
            else
              fail("bad \\u{...} escape");
            if (++n > 6) fail("\\u{...} escape too long");
          }
          if (at_end()) fail("unterminated \\u{...} escape");
          ++pos;
          if (v > kMaxCp) fail("code point out of range");
          return {v, false};
        }
        return {parse_hex(4), false};
      }
      case 'd': *class_out = digit_ranges(); return {0, true};
      case 'D': *class_out = complement_ranges(digit_ranges()); return {0, true};
      case 'w': *class_out = word_ranges(); return {0, true};
      case 'W': *class_out = complement_ranges(word_ranges()); return {0, true};
      case 's': *class_out = space_ranges(); return {0, true};
      case 'S': *class_out = complement_ranges(space_ranges()); return {0, true};
      case 'b':
      case 'B': fail("word boundaries are not supported");
      case 'p':
      case 'P': fail("unicode property classes are not supported");
      case 'k': fail("backreferences are not supported");
      default:
        if (c >= '1' && c <= '9') fail("backreferences are not supported");
        // any other escaped character is a literal
        --pos;
        return {next_codepoint(), false};
    }
  }

  std::vector<CpRange> parse_class() {
    // leading '[' consumed
    bool negate = false;
    if (!at_end() && peek() == '^') {
      negate = true;
      ++pos;
    }
    std::vector<CpRange> ranges;
    bool first = true;
    while (true) {
      if (at_end()) fail("unterminated character class");
      if (peek() == ']' && !first) {
        ++pos;
        break;
      }
      first = false;
      uint32_t lo;
      bool lo_is_class = false;
      std::vector<CpRange> sub;
      if (peek() == '\\') {
        ++pos;
        auto [cp, is_class] = parse_escape(&sub);
        lo = cp;
        lo_is_class = is_class;
      } else {
        lo = next_codepoint();
      }
      if (lo_is_class) {
        ranges.insert(ranges.end(), sub.begin(), sub.end());
        continue;
      }
      if (!at_end() && peek() == '-' && pos + 1 < text.size() && text[pos + 1] != ']') {
        ++pos;
        uint32_t hi;
        std::vector<CpRange> sub2;
        if (peek() == '\\') {
          ++pos;
          auto [cp, is_class] = parse_escape(&sub2);
          if (is_class) fail("class escape cannot bound a range");
          hi = cp;
        } else {
          hi = next_codepoint();
        }
        if (hi < lo) fail("reversed range in character class");
        ranges.push_back(CpRange{lo, hi});
      } else {
        ranges.push_back(CpRange{lo, lo});
      }
    }
    ranges = merge_ranges(ranges);
    return negate ? complement_ranges(ranges) : ranges;
  }

  AstPtr parse_alternation(int depth) {
    if (depth > 64) fail("pattern nesting too deep");
    auto alt = make_ast(Ast::Kind::Alt);
    alt->children.push_back(parse_sequence(depth));
    while (!at_end() && peek() == '|') {
      ++pos;
      alt->children.push_back(parse_sequence(depth));
    }
    if (alt->children.size() == 1) return std::move(alt->children[0]);
    return alt;
  }

  AstPtr parse_sequence(int depth) {
    auto seq = make_ast(Ast::Kind::Seq);
    while (!at_end() && peek() != '|' && peek() != ')') {
      AstPtr atom = parse_atom(depth);
      if (!atom) continue;  // position-only construct folded into flags
      // quantifiers
      while (!at_end()) {
        char q = peek();
        uint32_t mn, mx;
        if (q == '*') {
          mn = 0;
          mx = UINT32_MAX;
        } else if (q == '+') {
          mn = 1;
          mx = UINT32_MAX;
        } else if (q == '?') {
          mn = 0;
          mx = 1;
        } else if (q == '{') {
          size_t save = pos;
          ++pos;
          uint32_t a = 0;
          bool have_a = false;
          while (!at_end() && isdigit(static_cast<unsigned char>(peek()))) {
            a = a * 10 + static_cast<uint32_t>(text[pos++] - '0');
            have_a = true;
            if (a > 100000) fail("repetition bound too large");
          }
          if (!have_a) {
            pos = save;
            break;  // `{` is a literal when not a valid quantifier
          }
          uint32_t b = a;
          if (!at_end() && peek() == ',') {
            ++pos;
            if (!at_end() && peek() == '}') {
              b = UINT32_MAX;
            } else {
              b = 0;
              while (!at_end() && isdigit(static_cast<unsigned char>(peek()))) {
                b = b * 10 + static_cast<uint32_t>(text[pos++] - '0');
                if (b > 100000) fail("repetition bound too large");
              }
            }
          }
          if (at_end() || peek() != '}') {
            pos = save;
            break;
          }
          ++pos;
          if (b != UINT32_MAX && b < a) fail("reversed repetition bounds");
          mn = a;
          mx = b;
        } else {
          break;
        }
        if (q != '{') ++pos;
        if (!at_end() && peek() == '?') ++pos;  // lazy marker: irrelevant for acceptance
        auto rep = make_ast(Ast::Kind::Repeat);
        rep->child = std::move(atom);
        rep->rep_min = mn;
        rep->rep_max = mx;
        atom = std::move(rep);
      }
      seq->children.push_back(std::move(atom));
    }
    if (seq->children.empty()) return make_ast(Ast::Kind::Empty);
    if (seq->children.size() == 1) return std::move(seq->children[0]);
    return seq;
  }

  AstPtr parse_atom(int depth) {
    char c = peek();
    if (c == '^') {
      if (pos == 0) {
        anchored_head = true;
        ++pos;
        return nullptr;
      }
      fail("'^' is only supported at the start of the pattern");
    }
    if (c == '$') {
      if (pos + 1 == text.size()) {
        anchored_tail = true;
        ++pos;
        return nullptr;
      }
      fail("'$' is only supported at the end of the pattern");
    }
    if (c == '(') {
      ++pos;
      if (!at_end() && peek() == '?') {
        ++pos;
        if (at_end()) fail("unterminated group");
        char g = peek();
        if (g == ':') {
          ++pos;
        } else if (g == '<') {
          ++pos;
          if (!at_end() && (peek() == '=' || peek() == '!')) fail("lookbehind is not supported");
          while (!at_end() && peek() != '>') ++pos;
          if (at_end()) fail("unterminated group name");
          ++pos;
        } else if (g == '=' || g == '!') {
          fail("lookahead is not supported");
        } else {
          fail("unsupported group construct");
        }
      }
      AstPtr inner = parse_alternation(depth + 1);
      if (at_end() || peek() != ')') fail("unterminated group");
      ++pos;
      return inner;
    }
    if (c == '[') {
      ++pos;
      auto cls = make_ast(Ast::Kind::Class);
      cls->ranges = parse_class();
      return cls;
    }
    if (c == '.') {
      ++pos;
      auto cls = make_ast(Ast::Kind::Class);
      cls->ranges = dot_ranges();
      return cls;
    }
    if (c == '\\') {
      ++pos;
      std::vector<CpRange> sub;
      auto [cp, is_class] = parse_escape(&sub);
      auto cls = make_ast(Ast::Kind::Class);
      cls->ranges = is_class ? sub : std::vector<CpRange>{{cp, cp}};
      return cls;
    }
    if (c == '*' || c == '+' || c == '?') fail("quantifier with nothing to repeat");
    if (c == ')') fail("unbalanced ')'");
    auto cls = make_ast(Ast::Kind::Class);
    uint32_t cp = next_codepoint();
    cls->ranges = {{cp, cp}};
    return cls;
  }
};

// ---------------------------------------------------------------------------
// UTF-8 range lowering
// ---------------------------------------------------------------------------

void encode_utf8(uint32_t cp, uint8_t out[4], int* len) {
  if (cp < 0x80) {
    out[0] = static_cast<uint8_t>(cp);
    *len = 1;
  } else if (cp < 0x800) {
    out[0] = static_cast<uint8_t>(0xC0 | (cp >> 6));
    out[1] = static_cast<uint8_t>(0x80 | (cp & 0x3F));
    *len = 2;
  } else if (cp < 0x10000) {
    out[0] = static_cast<uint8_t>(0xE0 | (cp >> 12));
    out[1] = static_cast<uint8_t>(0x80 | ((cp >> 6) & 0x3F));
    out[2] = static_cast<uint8_t>(0x80 | (cp & 0x3F));
    *len = 3;
  } else {
    out[0] = static_cast<uint8_t>(0xF0 | (cp >> 18));
    out[1] = static_cast<uint8_t>(0x80 | ((cp >> 12) & 0x3F));
    out[2] = static_cast<uint8_t>(0x80 | ((cp >> 6) & 0x3F));
    out[3] = static_cast<uint8_t>(0x80 | (cp & 0x3F));
    *len = 4;
  }
}

struct NfaBuilder {
  ByteNfa& nfa;
  size_t max_states;

  uint32_t state() {
    if (nfa.size() >= max_states) throw RegexError("compiled pattern too large");
    return nfa.add_state();
  }

  // Emits byte paths from `from` to `to` for encodings of [lo..hi], where lo
  // and hi encode to the same byte length.
  void emit_same_length(uint32_t from, uint32_t to, const uint8_t* lo, const uint8_t* hi, int len) {
    if (len == 1) {
      nfa.add_edge(from, lo[0], hi[0], to);
      return;
    }
    if (lo[0] == hi[0]) {
      uint32_t mid = state();
      nfa.add_edge(from, lo[0], lo[0], mid);
      emit_same_length(mid, to, lo + 1, hi + 1, len - 1);
      return;
    }
    // lo branch: lo[0], then [lo+1 .. 0xBF * (len-1)]
    uint8_t maxtail[4] = {0xBF, 0xBF, 0xBF, 0xBF};
    uint8_t mintail[4] = {0x80, 0x80, 0x80, 0x80};
    {
      uint32_t mid = state();
      nfa.add_edge(from, lo[0], lo[0], mid);
      emit_same_length(mid, to, lo + 1, maxtail, len - 1);
    }
    // middle branch: (lo[0]+1 .. hi[0]-1) with full continuation ranges
    if (static_cast<uint8_t>(lo[0] + 1) <= static_cast<uint8_t>(hi[0] - 1)) {
      uint32_t mid = state();
      nfa.add_edge(from, static_cast<uint8_t>(lo[0] + 1), static_cast<uint8_t>(hi[0] - 1), mid);
      emit_same_length(mid, to, mintail, maxtail, len - 1);
    }
    // hi branch: hi[0], then [0x80.. .. hi+1]
    {
      uint32_t mid = state();
      nfa.add_edge(from, hi[0], hi[0], mid);
      emit_same_length(mid, to, mintail, hi + 1, len - 1);
    }
  }

  void emit_cp_range(uint32_t from, uint32_t to, uint32_t lo, uint32_t hi) {
    static const uint32_t bounds[5] = {0, 0x80, 0x800, 0x10000, 0x110000};
    for (int len = 1; len <= 4; ++len) {
      uint32_t seg_lo = std::max(lo, bounds[len - 1]);
      uint32_t seg_hi = std::min(hi, bounds[len] - 1);
      if (seg_lo > seg_hi) continue;
      uint8_t lo_bytes[4], hi_bytes[4];
      int l1, l2;
      encode_utf8(seg_lo, lo_bytes, &l1);
      encode_utf8(seg_hi, hi_bytes, &l2);
      emit_same_length(from, to, lo_bytes, hi_bytes, len);
    }
  }

  // Thompson construction: returns (start, end) of the fragment.
  std::pair<uint32_t, uint32_t> build(const Ast& node) {
    switch (node.kind) {
      case Ast::Kind::Empty: {
        uint32_t s = state();
        return {s, s};
      }
      case Ast::Kind::Class: {
        uint32_t s = state(), e = state();
        for (const auto& r : node.ranges) {
          // skip surrogate halves, which have no UTF-8 encoding
          uint32_t lo = r.lo, hi = r.hi;
          if (hi >= 0xD800 && lo <= 0xDFFF) {
            if (lo < 0xD800) emit_cp_range(s, e, lo, 0xD7FF);
            if (hi > 0xDFFF) emit_cp_range(s, e, 0xE000, hi);
          } else {
            emit_cp_range(s, e, lo, hi);
          }
        }
        return {s, e};
      }
      case Ast::Kind::Seq: {
        uint32_t start = 0, end = 0;
        bool first = true;
        for (const auto& c : node.children) {
          auto [s, e] = build(*c);
          if (first) {
            start = s;
            first = false;
          } else {
            nfa.add_eps(end, s);
          }
          end = e;
        }
        return {start, end};
      }
      case Ast::Kind::Alt: {
        uint32_t s = state(), e = state();
        for (const auto& c : node.children) {
          auto [cs, ce] = build(*c);
          nfa.add_eps(s, cs);
          nfa.add_eps(ce, e);
        }
        return {s, e};
      }
      case Ast::Kind::Repeat: {
        uint32_t mn = node.rep_min;
        uint32_t mx = node.rep_max;
        uint32_t s = state();
        uint32_t cur = s;
        for (uint32_t i = 0; i < mn; ++i) {
          auto [cs, ce] = build(*node.child);
          nfa.add_eps(cur, cs);
          cur = ce;
        }
        if (mx == UINT32_MAX) {
          auto [cs, ce] = build(*node.child);
          uint32_t e = state();
          nfa.add_eps(cur, cs);
          nfa.add_eps(ce, cs);
          nfa.add_eps(cur, e);
          nfa.add_eps(ce, e);
          return {s, e};
        }
        uint32_t e = state();
        nfa.add_eps(cur, e);
        for (uint32_t i = mn; i < mx; ++i) {
          auto [cs, ce] = build(*node.child);
          nfa.add_eps(cur, cs);
          cur = ce;
          nfa.add_eps(cur, e);
        }
        return {s, e};
      }
    }
    throw RegexError("internal: unhandled ast node");
  }
};

}  // namespace

std::shared_ptr<const ByteNfa> compile_regex(std::string_view pattern, const RegexOptions& opts) {
  RegexParser parser{pattern};
  AstPtr ast = parser.parse_alternation(0);
  if (!parser.at_end()) parser.fail("unbalanced ')'");

  auto nfa = std::make_shared<ByteNfa>();
  NfaBuilder builder{*nfa, opts.max_states};
  uint32_t start = builder.state();
  auto [ps, pe] = builder.build(*ast);
  uint32_t accept = builder.state();
  nfa->set_start(start);
  nfa->add_eps(start, ps);
  nfa->add_eps(pe, accept);
  nfa->set_accepting(accept);

  bool pad_head = opts.containment && !parser.anchored_head;
  bool pad_tail = opts.containment && !parser.anchored_tail;
  // Any-byte self loops realize the sigma-star padding; pattern encodings
  // never begin with a continuation byte, so byte-level padding cannot
  // produce a mid-code-point false match.
  if (pad_head) nfa->add_edge(start, 0x00, 0xFF, start);
  if (pad_tail) nfa->add_edge(accept, 0x00, 0xFF, accept);

  nfa->finalize();
  return nfa;
}

bool regex_matches(const ByteNfa& nfa, std::string_view text) {
  NfaSet set = NfaSet::initial(nfa);
  for (unsigned char c : text) {
    if (set.empty()) return false;
    set.advance(nfa, c);
  }
  return set.accepting(nfa);
}

}  // namespace tokengate
