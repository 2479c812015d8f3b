/*!
 * Copyright (c) 2026 by Contributors
 * \file tokengate/decode.hpp
 * \brief Token mask computation and the constrained decoding loop.
 */
#ifndef TOKENGATE_DECODE_HPP_
#define TOKENGATE_DECODE_HPP_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tokengate/automaton.hpp"
#include "tokengate/vocab.hpp"

namespace tokengate {

// Token i is allowed iff every byte of its sequence advances the matcher;
// the EOS bit mirrors can_terminate. Dead states yield an empty mask.
TokenMask compute_mask(const ConstraintAutomaton& a, const MatcherState& s, const TokenTrie& trie,
                       const Vocabulary& vocab);

struct TokenStep {
  enum class Status : uint8_t { Ok, RejectAt };
  Status status = Status::Ok;
  uint32_t reject_offset = 0;  // byte offset within the token on RejectAt
};

// Folds advance_byte over the token's bytes.
TokenStep advance_token(const ConstraintAutomaton& a, MatcherState& s, const std::string& bytes);

// While the mask holds exactly one non-EOS token, emits it. Returns the
// forced tokens (possibly none).
std::vector<TokenId> fast_forward(const ConstraintAutomaton& a, MatcherState& s,
                                  const TokenTrie& trie, const Vocabulary& vocab);

/*!
 * \brief Scoring interface for decode loops: returns one score per token id.
 */
class LogitsSource {
 public:
  virtual ~LogitsSource() = default;
  virtual void score(const std::vector<TokenId>& prompt, const std::vector<TokenId>& output,
                     std::vector<float>& scores) = 0;
};

// Replays a fixed token script: the scripted token (or EOS past the end)
// gets the top score at each step.
class ReplaySource : public LogitsSource {
 public:
  ReplaySource(std::vector<TokenId> script, TokenId eos_id)
      : script_(std::move(script)), eos_id_(eos_id) {}
  void score(const std::vector<TokenId>&, const std::vector<TokenId>& output,
             std::vector<float>& scores) override;

 private:
  std::vector<TokenId> script_;
  TokenId eos_id_;
};

// Identical score for every token; with lowest-id tie-breaking this makes
// decoding deterministic and maximally mask-driven.
class UniformSource : public LogitsSource {
 public:
  void score(const std::vector<TokenId>&, const std::vector<TokenId>&,
             std::vector<float>& scores) override {
    for (auto& s : scores) s = 0.0f;
  }
};

// Seeded adversarial source: independent scores per step.
class RandomSource : public LogitsSource {
 public:
  explicit RandomSource(uint64_t seed) : rng_(seed) {}
  void score(const std::vector<TokenId>&, const std::vector<TokenId>&,
             std::vector<float>& scores) override {
    for (auto& s : scores) s = dist_(rng_);
  }

 private:
  std::mt19937_64 rng_;
  std::uniform_real_distribution<float> dist_{0.0f, 1.0f};
};

class AdapterError : public std::runtime_error {
 public:
  enum class Code { ProtocolError, StreamClosed };
  AdapterError(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

/*!
 * \brief Line-protocol adapter over a byte stream pair: one JSON request
 * line per score call, one JSON response line back.
 *
 * Request:  {"id":k,"prompt":[ids],"output":[ids]}
 * Response: {"id":k,"scores":[V floats]}
 */
class AdapterSource : public LogitsSource {
 public:
  AdapterSource(std::istream& in, std::ostream& out, size_t vocab_size)
      : in_(in), out_(out), vocab_size_(vocab_size) {}
  void score(const std::vector<TokenId>& prompt, const std::vector<TokenId>& output,
             std::vector<float>& scores) override;

 private:
  std::istream& in_;
  std::ostream& out_;
  size_t vocab_size_;
  uint64_t next_id_ = 0;
};

struct DecodeOptions {
  uint32_t max_tokens = 1024;
  double generation_timeout_seconds = 40.0;
  bool fast_forward = false;
  bool include_gct_in_ttft = true;
  double gct_seconds = 0.0;  // compile time of the automaton, for timing
  std::vector<TokenId> prompt;
  uint32_t max_depth = 0;  // 0 = automaton default
  // Pass-through masking: the loop runs without constraint lookups, the
  // "LM only" efficiency baseline.
  bool pass_through_mask = false;
};

struct DecodeResult {
  enum class Termination : uint8_t { Eos, MaxTokens, Timeout, DeadEnd };
  std::vector<TokenId> tokens;
  std::string bytes;
  Termination terminated_by = Termination::DeadEnd;
  double gct_seconds = 0.0;
  double ttft_seconds = 0.0;
  std::vector<double> per_token_seconds;
  double tgt_seconds = 0.0;
  uint32_t ff_token_count = 0;
  uint32_t sampled_steps = 0;
};

// Greedy masked decoding (Algorithm 1 shape): advance constraint, compute
// mask, score, mask scores, take the argmax (lowest id wins ties), stop at
// EOS. States run in generation mode, so structural whitespace is masked
// out and emission stays compact.
DecodeResult constrained_decode(const ConstraintAutomaton& a, LogitsSource& source,
                                const Vocabulary& vocab, const TokenTrie& trie,
                                const DecodeOptions& opts);

struct WalkResult {
  enum class Status : uint8_t { Accepted, RejectedAt, PrematureEnd, Untokenizable };
  Status status = Status::Accepted;
  size_t byte_pos = 0;  // RejectedAt / Untokenizable
  std::vector<TokenId> tokens;
};

// Greedy longest-match tokenization of the instance bytes, then a token
// walk; Accepted requires legal termination at the end.
WalkResult walk_instance(const ConstraintAutomaton& a, const Vocabulary& vocab,
                         const TokenTrie& trie, const std::string& instance_bytes);

}  // namespace tokengate

#endif  // TOKENGATE_DECODE_HPP_
