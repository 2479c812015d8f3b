/*!
 * Copyright (c) 2026 by Contributors
 * \file tokengate/schema.hpp
 * \brief Schema documents, the normalized schema IR, and reference resolution.
 */
#ifndef TOKENGATE_SCHEMA_HPP_
#define TOKENGATE_SCHEMA_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tokengate/json_value.hpp"

namespace tokengate {

enum class SchemaDraft { Unknown, Draft04, Draft06, Draft07, Draft2019_09, Draft2020_12 };

std::string_view draft_name(SchemaDraft d);

class SchemaError : public std::runtime_error {
 public:
  enum class Code {
    MalformedJson,
    NotASchema,
    UnresolvedExternalRef,
    RefCycleTooDeep,
    UnsupportedKeyword,
    EmptyInput,
    IoError,
  };

  SchemaError(Code code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

struct SchemaDocument {
  JsonValue raw;  // object or boolean schema
  std::string source_id;
  std::optional<std::string> declared_draft_uri;
  SchemaDraft declared_draft = SchemaDraft::Unknown;
};

// Parses schema text. Boolean schemas are legal; a top-level number, string,
// or array is NotASchema; malformed JSON reports the byte offset.
SchemaDocument parse_schema(std::string_view text, std::string source_id = "<inline>");

using NodeId = uint32_t;

/*!
 * \brief One normalized schema node. Subschema positions are resolved to node
 * ids; everything else stays as raw JSON for the consumers to interpret.
 */
struct SchemaNode {
  enum class Kind { Object, BooleanTrue, BooleanFalse };
  Kind kind = Kind::Object;
  std::string pointer;  // location within the document, JSON-pointer syntax
  JsonValue raw;        // the raw schema object (empty for boolean schemas)

  std::optional<NodeId> ref;  // resolved $ref target
  // schema-valued keywords: items, additionalProperties, not, if, then, ...
  std::map<std::string, NodeId, std::less<>> schema_kw;
  // schema-array keywords: allOf, anyOf, oneOf, prefixItems
  std::map<std::string, std::vector<NodeId>, std::less<>> schema_list_kw;
  // schema-map keywords: properties, patternProperties, $defs, ...
  std::map<std::string, std::vector<std::pair<std::string, NodeId>>, std::less<>> schema_map_kw;
  std::vector<std::string> unknown_keywords;

  const JsonValue* keyword(std::string_view name) const {
    return kind == Kind::Object ? raw.find(name) : nullptr;
  }
  std::optional<NodeId> child(std::string_view name) const {
    auto it = schema_kw.find(name);
    if (it == schema_kw.end()) return std::nullopt;
    return it->second;
  }
  const std::vector<NodeId>* child_list(std::string_view name) const {
    auto it = schema_list_kw.find(name);
    return it == schema_list_kw.end() ? nullptr : &it->second;
  }
  const std::vector<std::pair<std::string, NodeId>>* child_map(std::string_view name) const {
    auto it = schema_map_kw.find(name);
    return it == schema_map_kw.end() ? nullptr : &it->second;
  }
};

struct SchemaIR {
  std::vector<SchemaNode> nodes;
  NodeId root = 0;
  SchemaDraft draft = SchemaDraft::Draft2020_12;
  std::string source_id;
  // JSON pointers of nodes participating in reference cycles.
  std::set<std::string> cycle_pointers;
  std::set<NodeId> cycle_nodes;

  const SchemaNode& node(NodeId id) const { return nodes[id]; }
};

/*!
 * \brief Resolves internal references, applies draft shims, flags unknown
 * keywords, and records reference cycles.
 *
 * External (non-fragment) $ref targets raise UnresolvedExternalRef; chains of
 * $ref that never reach a concrete schema raise RefCycleTooDeep.
 */
SchemaIR normalize(const SchemaDocument& doc);

// Evaluates an RFC 6901 JSON pointer (with optional URI percent-encoding)
// against a document. Returns nullptr when the pointer does not resolve.
const JsonValue* resolve_json_pointer(const JsonValue& doc, std::string_view pointer);

// Counts every object key in the raw document, recursively.
uint64_t count_fields(const SchemaDocument& doc);

// Counts Unicode code points of a UTF-8 string (continuation bytes excluded).
size_t utf8_length(std::string_view s);

}  // namespace tokengate

#endif  // TOKENGATE_SCHEMA_HPP_
