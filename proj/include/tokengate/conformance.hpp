/*!
 * Copyright (c) 2026 by Contributors
 * \file tokengate/conformance.hpp
 * \brief Test-suite runner: token-walk cases, classify failures, aggregate.
 */
#ifndef TOKENGATE_CONFORMANCE_HPP_
#define TOKENGATE_CONFORMANCE_HPP_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tokengate/decode.hpp"
#include "tokengate/manifest.hpp"
#include "tokengate/schema.hpp"

namespace tokengate {

struct TestInstance {
  JsonValue data;
  bool valid = false;
  std::string description;
};

struct TestCase {
  std::string description;
  SchemaDocument schema;
  std::vector<TestInstance> tests;
  std::string category;
  size_t index = 0;  // position within the category file
};

enum class FailureKind { CompileError, OverConstrained, UnderConstrained };

std::string_view failure_kind_name(FailureKind k);

struct InstanceVerdict {
  bool expected_valid = false;
  bool accepted = false;
  std::string detail;
};

struct CaseOutcome {
  std::string category;
  std::string description;
  size_t index = 0;
  bool pass = false;
  std::set<FailureKind> failures;
  std::vector<InstanceVerdict> verdicts;
};

struct SuiteLoadReport {
  uint64_t categories_seen = 0;
  uint64_t categories_kept = 0;
  uint64_t format_cases_dropped = 0;
  uint64_t remote_cases_dropped = 0;
};

// Loads the official suite layout: one JSON file per category, each an
// array of case objects. The 'format' category is excluded, as are cases
// whose schemas contain remote references.
std::vector<TestCase> load_suite(const std::string& dir, SuiteLoadReport* report = nullptr);

struct RunCaseOptions {
  double compile_timeout_seconds = 40.0;
};

// Compiles the case schema; a compile rejection passes only when every
// instance is invalid (the unsatisfiable-schema allowance). Otherwise walks
// each instance's canonical compact serialization: a blocked valid instance
// is OverConstrained, an accepted invalid one UnderConstrained.
CaseOutcome run_case(const TestCase& test_case, const KeywordManifest& manifest,
                     const Vocabulary& vocab, const TokenTrie& trie,
                     const RunCaseOptions& options = {});

struct CategoryCoverage {
  std::string category;
  uint64_t cases_total = 0;
  uint64_t cases_passed = 0;
  double proportion = 0.0;
  uint64_t compile_error_cases = 0;
  uint64_t over_constrained_cases = 0;
  uint64_t under_constrained_cases = 0;
};

struct ThresholdTable {
  // categories with coverage > 0%, > 25%, > 50%, > 75%, and == 100%
  uint64_t minimal = 0, partial = 0, moderate = 0, high = 0, full = 0;
};

struct AggregateReport {
  std::vector<CategoryCoverage> categories;  // sorted by name
  ThresholdTable thresholds;

  JsonValue to_json() const;
  std::string to_text() const;
};

AggregateReport aggregate(const std::vector<CaseOutcome>& outcomes);

struct FailureBreakdown {
  // number of categories with at least one failure of each kind
  uint64_t compile_error = 0;
  uint64_t over_constrained = 0;
  uint64_t under_constrained = 0;

  JsonValue to_json() const;
  std::string to_text() const;
};

FailureBreakdown failure_breakdown(const std::vector<CaseOutcome>& outcomes);

struct ConformanceRunOptions {
  unsigned jobs = 0;  // 0 = available parallelism
  RunCaseOptions case_options;
};

// Runs every case on a bounded worker pool; outcomes come back in
// deterministic (category, case index) order.
std::vector<CaseOutcome> run_suite(const std::vector<TestCase>& cases,
                                   const KeywordManifest& manifest, const Vocabulary& vocab,
                                   const TokenTrie& trie, const ConformanceRunOptions& options = {});

// Full machine-readable report (per-case verdicts + aggregates).
JsonValue conformance_report(const std::vector<CaseOutcome>& outcomes);

}  // namespace tokengate

#endif  // TOKENGATE_CONFORMANCE_HPP_
