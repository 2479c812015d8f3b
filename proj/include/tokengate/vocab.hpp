/*!
 * Copyright (c) 2026 by Contributors
 * \file tokengate/vocab.hpp
 * \brief Token vocabulary, prefix trie, and token masks.
 */
#ifndef TOKENGATE_VOCAB_HPP_
#define TOKENGATE_VOCAB_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tokengate {

using TokenId = uint32_t;

class VocabError : public std::runtime_error {
 public:
  enum class Code { GapInIds, MissingEos, Malformed, IoError };
  VocabError(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

struct Vocabulary {
  std::vector<std::string> tokens;  // index = token id -> byte sequence
  TokenId eos_id = 0;

  size_t size() const { return tokens.size(); }
  const std::string& bytes(TokenId id) const { return tokens[id]; }
};

/*!
 * \brief Loads a vocabulary file: line one is a JSON header object with
 * {"eos_id": n}; the remainder is a JSON array of base64-encoded byte
 * strings indexed by token id, or an object mapping decimal ids to base64
 * strings (which must be gap-free).
 */
Vocabulary load_vocabulary(const std::string& path);
Vocabulary parse_vocabulary(const std::string& content);

/*!
 * \brief Byte-labeled prefix tree over all token byte sequences.
 */
class TokenTrie {
 public:
  struct Node {
    std::vector<std::pair<uint8_t, uint32_t>> children;
    std::vector<TokenId> terminals;  // tokens whose bytes end here
  };

  explicit TokenTrie(const Vocabulary& vocab);

  const Node& node(uint32_t id) const { return nodes_[id]; }
  uint32_t root() const { return 0; }
  size_t node_count() const { return nodes_.size(); }

  // Child lookup; UINT32_MAX when absent.
  uint32_t child(uint32_t node, uint8_t byte) const;

 private:
  std::vector<Node> nodes_;
};

/*!
 * \brief Fixed-size bit vector over the vocabulary with cached popcount.
 */
class TokenMask {
 public:
  explicit TokenMask(size_t vocab_size)
      : size_(vocab_size), bits_((vocab_size + 63) / 64, 0) {}

  void set(TokenId id) {
    uint64_t& word = bits_[id >> 6];
    uint64_t bit = uint64_t(1) << (id & 63);
    if (!(word & bit)) {
      word |= bit;
      ++popcount_;
    }
  }
  bool test(TokenId id) const { return (bits_[id >> 6] >> (id & 63)) & 1; }
  void set_all() {
    for (size_t i = 0; i < size_; ++i) set(static_cast<TokenId>(i));
  }
  size_t popcount() const { return popcount_; }
  size_t size() const { return size_; }

  // Lowest set token id; size() when empty.
  TokenId first_set() const;

 private:
  size_t size_;
  std::vector<uint64_t> bits_;
  size_t popcount_ = 0;
};

// Base64 helpers (standard alphabet, padded).
std::string base64_encode(const std::string& bytes);
std::string base64_decode(const std::string& text);  // throws VocabError on garbage

}  // namespace tokengate

#endif  // TOKENGATE_VOCAB_HPP_
