/*!
 * Copyright (c) 2026 by Contributors
 * \file src/vocab.cpp
 * \brief Vocabulary loading and the token trie.
 */
#include "tokengate/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tokengate/json_value.hpp"

namespace tokengate {

// ---------------------------------------------------------------------------
// Base64
// ---------------------------------------------------------------------------

namespace {
constexpr char kB64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}
}  // namespace

std::string base64_encode(const std::string& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  size_t i = 0;
  while (i + 3 <= bytes.size()) {
    uint32_t v = (static_cast<uint8_t>(bytes[i]) << 16) | (static_cast<uint8_t>(bytes[i + 1]) << 8) |
                 static_cast<uint8_t>(bytes[i + 2]);
    out += kB64Alphabet[(v >> 18) & 63];
    out += kB64Alphabet[(v >> 12) & 63];
    out += kB64Alphabet[(v >> 6) & 63];
    out += kB64Alphabet[v & 63];
    i += 3;
  }
  size_t rest = bytes.size() - i;
  if (rest == 1) {
    uint32_t v = static_cast<uint8_t>(bytes[i]) << 16;
    out += kB64Alphabet[(v >> 18) & 63];
    out += kB64Alphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    uint32_t v = (static_cast<uint8_t>(bytes[i]) << 16) | (static_cast<uint8_t>(bytes[i + 1]) << 8);
    out += kB64Alphabet[(v >> 18) & 63];
    out += kB64Alphabet[(v >> 12) & 63];
    out += kB64Alphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::string base64_decode(const std::string& text) {
  std::string out;
  uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=') break;
    int v = b64_value(c);
    if (v < 0) throw VocabError(VocabError::Code::Malformed, "bad base64 character");
    acc = (acc << 6) | static_cast<uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out += static_cast<char>((acc >> bits) & 0xFF);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

Vocabulary parse_vocabulary(const std::string& content) {
  size_t newline = content.find('\n');
  if (newline == std::string::npos)
    throw VocabError(VocabError::Code::Malformed, "vocabulary file needs a header line");
  JsonValue header, body;
  try {
    header = JsonValue::parse(content.substr(0, newline));
    body = JsonValue::parse(content.substr(newline + 1));
  } catch (const JsonParseError& e) {
    throw VocabError(VocabError::Code::Malformed, std::string("vocabulary JSON: ") + e.what());
  }
  const JsonValue* eos = header.find("eos_id");
  if (!eos || !eos->is_number() || !eos->as_number().is_integer())
    throw VocabError(VocabError::Code::MissingEos, "header must carry an integer eos_id");

  Vocabulary vocab;
  if (body.is_array()) {
    for (const auto& item : body.as_array()) {
      if (!item.is_string())
        throw VocabError(VocabError::Code::Malformed, "vocabulary entries must be base64 strings");
      vocab.tokens.push_back(base64_decode(item.as_string()));
    }
  } else if (body.is_object()) {
    // id -> base64 map; ids must be dense 0..V-1
    std::vector<std::pair<uint64_t, std::string>> entries;
    for (const auto& m : body.as_object()) {
      if (!m.value.is_string())
        throw VocabError(VocabError::Code::Malformed, "vocabulary entries must be base64 strings");
      if (m.key.empty() || m.key.find_first_not_of("0123456789") != std::string::npos)
        throw VocabError(VocabError::Code::Malformed, "vocabulary map keys must be decimal ids");
      entries.emplace_back(std::stoull(m.key), base64_decode(m.value.as_string()));
    }
    std::sort(entries.begin(), entries.end());
    for (size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].first != i)
        throw VocabError(VocabError::Code::GapInIds,
                         "token ids must be dense; missing id " + std::to_string(i));
      vocab.tokens.push_back(std::move(entries[i].second));
    }
  } else {
    throw VocabError(VocabError::Code::Malformed, "vocabulary body must be an array or object");
  }

  auto eos_id = eos->as_number().to_int64();
  if (!eos_id || *eos_id < 0 || static_cast<uint64_t>(*eos_id) >= vocab.tokens.size())
    throw VocabError(VocabError::Code::MissingEos, "eos_id out of range");
  vocab.eos_id = static_cast<TokenId>(*eos_id);
  for (size_t i = 0; i < vocab.tokens.size(); ++i) {
    if (vocab.tokens[i].empty() && i != vocab.eos_id)
      throw VocabError(VocabError::Code::Malformed,
                       "token " + std::to_string(i) + " has an empty byte sequence");
  }
  return vocab;
}

Vocabulary load_vocabulary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw VocabError(VocabError::Code::IoError, "cannot open vocabulary file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_vocabulary(ss.str());
}

// ---------------------------------------------------------------------------
// TokenTrie
// ---------------------------------------------------------------------------

TokenTrie::TokenTrie(const Vocabulary& vocab) {
  nodes_.emplace_back();
  for (TokenId id = 0; id < vocab.size(); ++id) {
    const std::string& bytes = vocab.bytes(id);
    if (bytes.empty()) continue;  // eos carries no bytes
    uint32_t cur = 0;
    for (unsigned char b : bytes) {
      uint32_t next = child(cur, b);
      if (next == UINT32_MAX) {
        next = static_cast<uint32_t>(nodes_.size());
        nodes_[cur].children.emplace_back(b, next);
        nodes_.emplace_back();
      }
      cur = next;
    }
    nodes_[cur].terminals.push_back(id);
  }
}

uint32_t TokenTrie::child(uint32_t node, uint8_t byte) const {
  for (const auto& [b, c] : nodes_[node].children)
    if (b == byte) return c;
  return UINT32_MAX;
}

TokenId TokenMask::first_set() const {
  for (size_t w = 0; w < bits_.size(); ++w) {
    if (bits_[w]) {
      TokenId id = static_cast<TokenId>(w * 64 + __builtin_ctzll(bits_[w]));
      return id < size_ ? id : static_cast<TokenId>(size_);
    }
  }
  return static_cast<TokenId>(size_);
}

}  // namespace tokengate
