/*!
 * Copyright (c) 2026 by Contributors
 * \file src/decode.cpp
 * \brief Mask computation, token walking, and the decode loop.
 */
#include "tokengate/decode.hpp"

#include <chrono>
#include <istream>
#include <limits>
#include <ostream>

#include "tokengate/json_value.hpp"

namespace tokengate {

// ---------------------------------------------------------------------------
// Mask computation: depth-first walk of the trie, advancing a forked state
// along each edge; every surviving node contributes its terminal tokens.
// ---------------------------------------------------------------------------

namespace {

void mask_dfs(const ConstraintAutomaton& a, const TokenTrie& trie, uint32_t trie_node,
              const MatcherState& state, TokenMask& mask) {
  for (TokenId id : trie.node(trie_node).terminals) mask.set(id);
  for (const auto& [byte, child] : trie.node(trie_node).children) {
    MatcherState fork = state;
    if (advance_byte(a, fork, byte) == StepResult::Advanced) {
      mask_dfs(a, trie, child, fork, mask);
    }
  }
}

}  // namespace

TokenMask compute_mask(const ConstraintAutomaton& a, const MatcherState& s, const TokenTrie& trie,
                       const Vocabulary& vocab) {
  TokenMask mask(vocab.size());
  if (!s.alive()) return mask;
  for (const auto& [byte, child] : trie.node(trie.root()).children) {
    MatcherState fork = s;
    if (advance_byte(a, fork, byte) == StepResult::Advanced) {
      mask_dfs(a, trie, child, fork, mask);
    }
  }
  if (can_terminate(a, s)) mask.set(vocab.eos_id);
  return mask;
}

TokenStep advance_token(const ConstraintAutomaton& a, MatcherState& s, const std::string& bytes) {
  for (size_t i = 0; i < bytes.size(); ++i) {
    if (advance_byte(a, s, static_cast<uint8_t>(bytes[i])) != StepResult::Advanced) {
      return TokenStep{TokenStep::Status::RejectAt, static_cast<uint32_t>(i)};
    }
  }
  return TokenStep{};
}

std::vector<TokenId> fast_forward(const ConstraintAutomaton& a, MatcherState& s,
                                  const TokenTrie& trie, const Vocabulary& vocab) {
  std::vector<TokenId> forced;
  while (true) {
    TokenMask mask = compute_mask(a, s, trie, vocab);
    if (mask.popcount() != 1) break;
    TokenId only = mask.first_set();
    if (only == vocab.eos_id) break;
    TokenStep step = advance_token(a, s, vocab.bytes(only));
    if (step.status != TokenStep::Status::Ok) break;  // cannot happen for a masked token
    forced.push_back(only);
  }
  return forced;
}

// ---------------------------------------------------------------------------
// Logits sources
// ---------------------------------------------------------------------------

void ReplaySource::score(const std::vector<TokenId>&, const std::vector<TokenId>& output,
                         std::vector<float>& scores) {
  for (auto& s : scores) s = 0.0f;
  TokenId want = output.size() < script_.size() ? script_[output.size()] : eos_id_;
  if (want < scores.size()) scores[want] = 1.0f;
}

void AdapterSource::score(const std::vector<TokenId>& prompt, const std::vector<TokenId>& output,
                          std::vector<float>& scores) {
  JsonValue req = JsonValue::object();
  req.set("id", JsonValue::number(static_cast<int64_t>(next_id_)));
  JsonValue parr = JsonValue::array();
  for (TokenId t : prompt) parr.push_back(JsonValue::number(static_cast<int64_t>(t)));
  JsonValue oarr = JsonValue::array();
  for (TokenId t : output) oarr.push_back(JsonValue::number(static_cast<int64_t>(t)));
  req.set("prompt", std::move(parr));
  req.set("output", std::move(oarr));
  out_ << req.serialize() << "\n";
  out_.flush();

  std::string line;
  if (!std::getline(in_, line)) {
    throw AdapterError(AdapterError::Code::StreamClosed, "adapter stream closed mid-session");
  }
  JsonValue resp;
  try {
    resp = JsonValue::parse(line);
  } catch (const JsonParseError& e) {
    throw AdapterError(AdapterError::Code::ProtocolError,
                       std::string("bad adapter response: ") + e.what());
  }
  const JsonValue* id = resp.find("id");
  if (!id || !id->is_number() || !(id->as_number() == Decimal::from_int(static_cast<int64_t>(next_id_))))
    throw AdapterError(AdapterError::Code::ProtocolError, "adapter response id mismatch");
  const JsonValue* arr = resp.find("scores");
  if (!arr || !arr->is_array() || arr->as_array().size() != vocab_size_)
    throw AdapterError(AdapterError::Code::ProtocolError,
                       "adapter response must carry exactly V scores");
  for (size_t i = 0; i < vocab_size_; ++i) {
    const JsonValue& v = arr->as_array()[i];
    if (!v.is_number())
      throw AdapterError(AdapterError::Code::ProtocolError, "adapter scores must be numbers");
    try {
      scores[i] = std::stof(v.as_number().to_string());
    } catch (const std::exception&) {
      scores[i] = 0.0f;
    }
  }
  ++next_id_;
}

// ---------------------------------------------------------------------------
// Decode loop
// ---------------------------------------------------------------------------

DecodeResult constrained_decode(const ConstraintAutomaton& a, LogitsSource& source,
                                const Vocabulary& vocab, const TokenTrie& trie,
                                const DecodeOptions& opts) {
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  auto deadline =
      t0 + std::chrono::duration_cast<clock::duration>(
               std::chrono::duration<double>(opts.generation_timeout_seconds));
  DecodeResult result;
  result.gct_seconds = opts.gct_seconds;
  double base = opts.include_gct_in_ttft ? opts.gct_seconds : 0.0;

  MatcherState state = start_state(a, /*walk_mode=*/false, opts.max_depth);
  std::vector<float> scores(vocab.size());
  bool first_token_seen = false;
  auto elapsed = [&]() { return std::chrono::duration<double>(clock::now() - t0).count(); };
  auto note_token = [&](TokenId id, double step_seconds) {
    result.tokens.push_back(id);
    result.bytes += vocab.bytes(id);
    result.per_token_seconds.push_back(step_seconds);
    if (!first_token_seen) {
      first_token_seen = true;
      result.ttft_seconds = base + elapsed();
    }
  };

  while (true) {
    if (clock::now() > deadline) {
      result.terminated_by = DecodeResult::Termination::Timeout;
      break;
    }
    if (result.tokens.size() >= opts.max_tokens) {
      result.terminated_by = DecodeResult::Termination::MaxTokens;
      break;
    }
    auto step_start = clock::now();

    if (opts.fast_forward && !opts.pass_through_mask) {
      std::vector<TokenId> forced = fast_forward(a, state, trie, vocab);
      if (!forced.empty()) {
        double step_seconds = std::chrono::duration<double>(clock::now() - step_start).count();
        for (size_t i = 0; i < forced.size(); ++i) {
          note_token(forced[i], i == 0 ? step_seconds : 0.0);
          ++result.ff_token_count;
        }
        if (result.tokens.size() >= opts.max_tokens) {
          result.terminated_by = DecodeResult::Termination::MaxTokens;
          break;
        }
        step_start = clock::now();
      }
    }

    TokenMask mask(vocab.size());
    if (opts.pass_through_mask) {
      mask.set_all();
    } else {
      mask = compute_mask(a, state, trie, vocab);
    }
    if (mask.popcount() == 0) {
      result.terminated_by = DecodeResult::Termination::DeadEnd;
      break;
    }
    source.score(opts.prompt, result.tokens, scores);
    ++result.sampled_steps;

    float best_score = -std::numeric_limits<float>::infinity();
    TokenId best = static_cast<TokenId>(vocab.size());
    for (TokenId id = 0; id < vocab.size(); ++id) {
      if (!mask.test(id)) continue;
      if (scores[id] > best_score) {
        best_score = scores[id];
        best = id;
      }
    }
    double step_seconds = std::chrono::duration<double>(clock::now() - step_start).count();
    if (best == vocab.eos_id) {
      if (!first_token_seen) {
        first_token_seen = true;
        result.ttft_seconds = base + elapsed();
      }
      result.terminated_by = DecodeResult::Termination::Eos;
      break;
    }
    if (!opts.pass_through_mask) {
      TokenStep step = advance_token(a, state, vocab.bytes(best));
      if (step.status != TokenStep::Status::Ok) {
        result.terminated_by = DecodeResult::Termination::DeadEnd;
        break;
      }
    }
    note_token(best, step_seconds);
  }

  result.tgt_seconds = base + elapsed();
  if (!first_token_seen) result.ttft_seconds = result.tgt_seconds;
  return result;
}

// ---------------------------------------------------------------------------
// Instance walking
// ---------------------------------------------------------------------------

WalkResult walk_instance(const ConstraintAutomaton& a, const Vocabulary& vocab,
                         const TokenTrie& trie, const std::string& instance_bytes) {
  WalkResult result;
  // greedy longest-match tokenization
  size_t pos = 0;
  while (pos < instance_bytes.size()) {
    uint32_t node = trie.root();
    size_t best_len = 0;
    TokenId best_token = 0;
    size_t look = pos;
    while (look < instance_bytes.size()) {
      uint32_t next = trie.child(node, static_cast<uint8_t>(instance_bytes[look]));
      if (next == UINT32_MAX) break;
      node = next;
      ++look;
      if (!trie.node(node).terminals.empty()) {
        best_len = look - pos;
        best_token = trie.node(node).terminals.front();
      }
    }
    if (best_len == 0) {
      result.status = WalkResult::Status::Untokenizable;
      result.byte_pos = pos;
      return result;
    }
    result.tokens.push_back(best_token);
    pos += best_len;
  }

  MatcherState state = start_state(a, /*walk_mode=*/true);
  size_t consumed = 0;
  for (TokenId id : result.tokens) {
    const std::string& bytes = vocab.bytes(id);
    TokenStep step = advance_token(a, state, bytes);
    if (step.status != TokenStep::Status::Ok) {
      result.status = WalkResult::Status::RejectedAt;
      result.byte_pos = consumed + step.reject_offset;
      return result;
    }
    consumed += bytes.size();
  }
  if (!can_terminate(a, state)) {
    result.status = WalkResult::Status::PrematureEnd;
    result.byte_pos = consumed;
    return result;
  }
  result.status = WalkResult::Status::Accepted;
  return result;
}

}  // namespace tokengate
