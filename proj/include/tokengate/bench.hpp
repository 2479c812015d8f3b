/*!
 * Copyright (c) 2026 by Contributors
 * \file tokengate/bench.hpp
 * \brief Coverage / compliance / efficiency benchmark harness.
 */
#ifndef TOKENGATE_BENCH_HPP_
#define TOKENGATE_BENCH_HPP_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tokengate/dataset.hpp"
#include "tokengate/decode.hpp"
#include "tokengate/manifest.hpp"

namespace tokengate {

class BenchError : public std::runtime_error {
 public:
  enum class Code { EmptyIntersection, UnknownFormat, IoError };
  BenchError(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

struct RunConfig {
  double compile_timeout_seconds = 40.0;
  double generation_timeout_seconds = 40.0;
  uint32_t max_tokens = 512;
  uint32_t samples_per_schema = 1;
  bool fast_forward = false;
  uint64_t seed = 0;
  unsigned jobs = 0;  // 0 = available parallelism
  std::string engine_name = "tokengate";
};

struct EfficiencyRecord {
  double gct_seconds = 0.0;
  double ttft_seconds = 0.0;
  double tpot_ms = 0.0;  // (tgt - ttft) / (output_tokens - 1), for > 1 token
  double tgt_seconds = 0.0;
  uint64_t output_tokens = 0;
  uint64_t ff_tokens = 0;
};

enum class RunFailure { None, CompileReject, CompileTimeout, GenTimeout, DeadEnd, Invalid };

std::string_view run_failure_name(RunFailure f);

struct SchemaRunRecord {
  std::string source_id;
  std::string dataset;
  bool declared = false;
  std::optional<std::string> generated;  // output bytes when generation completed
  std::optional<bool> compliant;         // defined iff generation completed
  RunFailure failure = RunFailure::None;
  std::optional<EfficiencyRecord> efficiency;  // absent when not declared
};

struct DatasetCoverage {
  std::string dataset;
  uint64_t schemas = 0;
  uint64_t declared_count = 0;
  uint64_t empirical_count = 0;
  double declared = 0.0;
  double empirical = 0.0;
  std::optional<double> compliance;  // empirical/declared; absent when declared == 0
  std::map<std::string, uint64_t> failure_histogram;
};

struct CoverageReport {
  std::string engine;
  std::vector<DatasetCoverage> rows;  // sorted by dataset name

  JsonValue to_json(bool include_records = false,
                    const std::vector<SchemaRunRecord>* records = nullptr) const;
};

// Two-decimal half-up rounding used for compliance presentation.
double round2_half_up(double v);

// Builds one scoring source per schema run (seeded deterministically).
using SourceFactory =
    std::function<std::unique_ptr<LogitsSource>(const DatasetRecord&, uint64_t seed)>;

struct CoverageRun {
  std::vector<SchemaRunRecord> records;
  CoverageReport report;
};

// Per schema: compile decides declared coverage; declared schemas decode and
// validate. Generation timeouts stay declared but fail empirically; engine
// crashes and dead ends demote the schema from declared coverage.
CoverageRun run_coverage(const std::vector<DatasetRecord>& corpus, const RunConfig& config,
                         const KeywordManifest& manifest, const Vocabulary& vocab,
                         const TokenTrie& trie, const SourceFactory& make_source);

struct EngineVariant {
  std::string name;
  bool mask = true;          // pass-through mask when false ("LM only")
  bool fast_forward = false;
};

struct VariantMedians {
  std::string variant;
  uint64_t runs = 0;
  double gct_seconds = 0.0;
  double ttft_seconds = 0.0;
  double tpot_ms = 0.0;
  double tgt_seconds = 0.0;
  double output_tokens = 0.0;
  double ff_tokens = 0.0;
};

struct EfficiencyReport {
  std::vector<std::string> intersection;  // schemas declared by all variants
  std::vector<VariantMedians> medians;
  std::map<std::string, std::vector<std::pair<std::string, EfficiencyRecord>>> records;

  JsonValue to_json() const;
  std::string to_text() const;
};

// Efficiency metrics are computed on the intersection of schemas declared
// covered by every variant. Throws EmptyIntersection when nothing survives.
EfficiencyReport run_efficiency(const std::vector<DatasetRecord>& corpus, const RunConfig& config,
                                const std::vector<EngineVariant>& variants,
                                const KeywordManifest& manifest, const Vocabulary& vocab,
                                const TokenTrie& trie, const SourceFactory& make_source);

// Lower-median convention for even-length inputs; empty input yields 0.
double median_lower(std::vector<double> values);

struct PromptShot {
  std::string schema_text;
  std::string output_text;
};

// System instruction plus two-shot blocks; byte-stable for fixed inputs.
std::string build_prompt(const std::string& schema_text, const std::vector<PromptShot>& shots);

enum class ReportFormat { Json, Csv, TextTable };

// Renders a coverage report. Unknown format strings raise UnknownFormat.
ReportFormat parse_report_format(const std::string& name);
std::string emit_report(const CoverageReport& report, ReportFormat format);

}  // namespace tokengate

#endif  // TOKENGATE_BENCH_HPP_
