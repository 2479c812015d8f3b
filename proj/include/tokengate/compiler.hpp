/*!
 * Copyright (c) 2026 by Contributors
 * \file tokengate/compiler.hpp
 * \brief Schema IR -> constraint automaton compilation.
 */
#ifndef TOKENGATE_COMPILER_HPP_
#define TOKENGATE_COMPILER_HPP_

#include <memory>
#include <string>
#include <vector>

#include "tokengate/automaton.hpp"
#include "tokengate/manifest.hpp"
#include "tokengate/schema.hpp"

namespace tokengate {

struct CompileOptions {
  double compile_timeout_seconds = 40.0;
  uint32_t max_depth = 64;
  size_t max_nodes = 100000;
};

struct UnsupportedUse {
  std::string path;     // schema location
  std::string keyword;
  std::string detail;
};

struct DeclaredCoverage {
  bool covered = false;
  std::vector<UnsupportedUse> unsupported;
};

// Scans the reachable IR for keyword uses outside the manifest, evaluating
// Partial conditions. covered == unsupported.empty().
DeclaredCoverage declared_covered(const SchemaIR& ir, const KeywordManifest& manifest);

struct CompileOutcome {
  enum class Status { Ok, Rejected, TimedOut };
  Status status = Status::Rejected;
  std::shared_ptr<const ConstraintAutomaton> automaton;  // Ok only
  std::vector<UnsupportedUse> rejected;                  // Rejected: nonempty
  double seconds = 0.0;

  bool ok() const { return status == Status::Ok; }
};

// Conservative compilation: rejects whenever declared_covered is false,
// otherwise builds an automaton whose accepted strings are all valid
// instances. Wall time is recorded in the outcome and the automaton.
CompileOutcome compile(const SchemaIR& ir, const KeywordManifest& manifest,
                       const CompileOptions& opts = {});

// Best-effort syntactic unsatisfiability: true only on a sound
// contradiction; false means unknown.
bool detect_unsatisfiable(const SchemaIR& ir);

}  // namespace tokengate

#endif  // TOKENGATE_COMPILER_HPP_
