/*!
 * Copyright (c) 2026 by Contributors
 * \file tokengate/validator.hpp
 * \brief Instance validator over the schema IR; the compliance oracle.
 */
#ifndef TOKENGATE_VALIDATOR_HPP_
#define TOKENGATE_VALIDATOR_HPP_

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "tokengate/json_value.hpp"
#include "tokengate/regex.hpp"
#include "tokengate/schema.hpp"

namespace tokengate {

struct Violation {
  std::string instance_path;
  std::string keyword;
  std::string message;
};

struct ValidationOutcome {
  bool valid = true;
  std::vector<Violation> violations;
};

/*!
 * \brief Compiled validator for one schema IR.
 *
 * Construction precompiles every pattern. Keywords outside the supported set
 * raise UnsupportedKeyword when a node carrying them is evaluated, never a
 * silent pass; unreachable nodes do not block construction. Validation
 * itself is const and safe to run concurrently.
 */
class Validator {
 public:
  explicit Validator(SchemaIR ir);

  ValidationOutcome validate(const JsonValue& instance) const;
  // Validates against a specific node of the IR (used for enum filtering).
  ValidationOutcome validate_at(NodeId start, const JsonValue& instance) const;

  // Keywords this validator asserts. A superset of the grammar manifest.
  static const std::set<std::string>& supported_keywords();

  const SchemaIR& ir() const { return ir_; }

 private:
  struct NodePatterns {
    std::shared_ptr<const ByteNfa> pattern;
    std::string pattern_error;
    std::vector<std::pair<std::string, std::shared_ptr<const ByteNfa>>> pattern_properties;
    std::string pattern_properties_error;
  };

  struct EvalContext;
  bool eval(NodeId id, const JsonValue& inst, const std::string& path, EvalContext& ctx) const;

  SchemaIR ir_;
  std::vector<NodePatterns> patterns_;
};

// Convenience wrapper: builds a Validator and validates one instance.
ValidationOutcome validate_instance(const SchemaIR& ir, const JsonValue& instance);

}  // namespace tokengate

#endif  // TOKENGATE_VALIDATOR_HPP_
