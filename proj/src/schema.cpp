/*!
 * Copyright (c) 2026 by Contributors
 * \file src/schema.cpp
 * \brief Schema parsing, normalization, and reference resolution.
 */
#include "tokengate/schema.hpp"

#include <algorithm>
#include <cassert>
#include <functional>

namespace tokengate {

std::string_view draft_name(SchemaDraft d) {
  switch (d) {
    case SchemaDraft::Draft04: return "draft-04";
    case SchemaDraft::Draft06: return "draft-06";
    case SchemaDraft::Draft07: return "draft-07";
    case SchemaDraft::Draft2019_09: return "2019-09";
    case SchemaDraft::Draft2020_12: return "2020-12";
    case SchemaDraft::Unknown: return "unknown";
  }
  return "unknown";
}

namespace {

SchemaDraft classify_draft(std::string_view uri) {
  if (uri.find("draft-04") != std::string_view::npos) return SchemaDraft::Draft04;
  if (uri.find("draft-06") != std::string_view::npos) return SchemaDraft::Draft06;
  if (uri.find("draft-07") != std::string_view::npos) return SchemaDraft::Draft07;
  if (uri.find("2019-09") != std::string_view::npos) return SchemaDraft::Draft2019_09;
  if (uri.find("2020-12") != std::string_view::npos) return SchemaDraft::Draft2020_12;
  return SchemaDraft::Unknown;
}

}  // namespace

SchemaDocument parse_schema(std::string_view text, std::string source_id) {
  JsonValue raw;
  try {
    raw = JsonValue::parse(text);
  } catch (const JsonParseError& e) {
    throw SchemaError(SchemaError::Code::MalformedJson, std::string(e.what()));
  }
  if (!raw.is_object() && !raw.is_boolean()) {
    throw SchemaError(SchemaError::Code::NotASchema,
                      "top-level schema must be an object or boolean");
  }
  SchemaDocument doc;
  doc.source_id = std::move(source_id);
  if (const JsonValue* s = raw.find("$schema"); s && s->is_string()) {
    doc.declared_draft_uri = s->as_string();
    doc.declared_draft = classify_draft(s->as_string());
  }
  doc.raw = std::move(raw);
  return doc;
}

// ---------------------------------------------------------------------------
// JSON pointer
// ---------------------------------------------------------------------------

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string percent_decode(std::string_view s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && hex_value(s[i + 1]) >= 0 && hex_value(s[i + 2]) >= 0) {
      out += static_cast<char>(hex_value(s[i + 1]) * 16 + hex_value(s[i + 2]));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::string pointer_unescape(std::string_view token) {
  std::string out;
  for (size_t i = 0; i < token.size(); ++i) {
    if (token[i] == '~' && i + 1 < token.size()) {
      if (token[i + 1] == '0') {
        out += '~';
        ++i;
        continue;
      }
      if (token[i + 1] == '1') {
        out += '/';
        ++i;
        continue;
      }
    }
    out += token[i];
  }
  return out;
}

}  // namespace

const JsonValue* resolve_json_pointer(const JsonValue& doc, std::string_view pointer) {
  std::string decoded = percent_decode(pointer);
  const JsonValue* cur = &doc;
  size_t i = 0;
  if (decoded.empty()) return cur;
  if (decoded[0] != '/') return nullptr;
  while (i < decoded.size()) {
    size_t next = decoded.find('/', i + 1);
    std::string token =
        pointer_unescape(decoded.substr(i + 1, next == std::string::npos ? next : next - i - 1));
    if (cur->is_object()) {
      cur = cur->find(token);
      if (!cur) return nullptr;
    } else if (cur->is_array()) {
      if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) return nullptr;
      if (token.size() > 1 && token[0] == '0') return nullptr;
      size_t idx = std::stoull(token);
      if (idx >= cur->as_array().size()) return nullptr;
      cur = &cur->as_array()[idx];
    } else {
      return nullptr;
    }
    if (next == std::string::npos) break;
    i = next;
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

namespace {

// Keywords whose value is a single subschema.
const char* kSchemaValued[] = {"items",          "additionalProperties",
                               "not",            "if",
                               "then",           "else",
                               "contains",       "propertyNames",
                               "unevaluatedItems", "unevaluatedProperties",
                               "contentSchema"};
// Keywords whose value is an array of subschemas.
const char* kSchemaListValued[] = {"allOf", "anyOf", "oneOf", "prefixItems"};
// Keywords whose value is an object mapping names to subschemas.
const char* kSchemaMapValued[] = {"properties", "patternProperties", "$defs", "definitions",
                                  "dependentSchemas"};

// Constraint and applicator keywords we know about; anything else that is not
// an annotation gets flagged as unknown.
const char* kKnownKeywords[] = {
    "$schema",        "$id",
    "$ref",           "$defs",
    "definitions",    "$anchor",
    "$dynamicRef",    "$dynamicAnchor",
    "$recursiveRef",  "$recursiveAnchor",
    "$vocabulary",    "$comment",
    "type",           "enum",
    "const",          "multipleOf",
    "maximum",        "exclusiveMaximum",
    "minimum",        "exclusiveMinimum",
    "maxLength",      "minLength",
    "pattern",        "format",
    "items",          "prefixItems",
    "additionalItems", "maxItems",
    "minItems",       "uniqueItems",
    "contains",       "maxContains",
    "minContains",    "maxProperties",
    "minProperties",  "required",
    "properties",     "patternProperties",
    "additionalProperties", "propertyNames",
    "dependentRequired", "dependentSchemas",
    "dependencies",   "allOf",
    "anyOf",          "oneOf",
    "not",            "if",
    "then",           "else",
    "unevaluatedItems", "unevaluatedProperties",
    "title",          "description",
    "default",        "examples",
    "deprecated",     "readOnly",
    "writeOnly",      "contentMediaType",
    "contentEncoding", "contentSchema",
};

bool is_known_keyword(std::string_view k) {
  for (const char* kw : kKnownKeywords)
    if (k == kw) return true;
  return false;
}

struct Normalizer {
  const SchemaDocument& doc;
  SchemaIR ir;
  // document pointer -> node id, for $ref resolution
  std::map<std::string, NodeId> by_pointer;
  // $anchor name -> node id
  std::map<std::string, NodeId> by_anchor;
  struct PendingRef {
    NodeId node;
    std::string target;  // raw $ref string
  };
  std::vector<PendingRef> pending_refs;

  // Pre-2020-12 compatibility shims, applied to a copy of the raw node:
  // tuple-form items, boolean exclusive bounds, and `dependencies`.
  JsonValue shim(const JsonValue& raw) {
    JsonValue out = JsonValue::object();
    const JsonValue* items = raw.find("items");
    bool tuple_items = items && items->is_array();
    const JsonValue* excl_min = raw.find("exclusiveMinimum");
    const JsonValue* excl_max = raw.find("exclusiveMaximum");
    bool bool_excl_min = excl_min && excl_min->is_boolean();
    bool bool_excl_max = excl_max && excl_max->is_boolean();

    for (const auto& m : raw.as_object()) {
      if (tuple_items && (m.key == "items" || m.key == "additionalItems")) continue;
      if (bool_excl_min && m.key == "exclusiveMinimum") continue;
      if (bool_excl_max && m.key == "exclusiveMaximum") continue;
      if (bool_excl_min && m.key == "minimum" && excl_min->as_boolean()) continue;
      if (bool_excl_max && m.key == "maximum" && excl_max->as_boolean()) continue;
      if (m.key == "dependencies" && m.value.is_object()) continue;
      out.set(m.key, m.value);
    }
    if (tuple_items) {
      if (!raw.find("prefixItems")) out.set("prefixItems", *items);
      if (const JsonValue* ai = raw.find("additionalItems"))
        out.set("items", *ai);
    }
    if (bool_excl_min && excl_min->as_boolean()) {
      if (const JsonValue* b = raw.find("minimum"); b && b->is_number())
        out.set("exclusiveMinimum", *b);
    }
    if (bool_excl_max && excl_max->as_boolean()) {
      if (const JsonValue* b = raw.find("maximum"); b && b->is_number())
        out.set("exclusiveMaximum", *b);
    }
    if (const JsonValue* deps = raw.find("dependencies"); deps && deps->is_object()) {
      JsonValue dep_req = JsonValue::object();
      JsonValue dep_schemas = JsonValue::object();
      for (const auto& m : deps->as_object()) {
        if (m.value.is_array())
          dep_req.set(m.key, m.value);
        else
          dep_schemas.set(m.key, m.value);
      }
      if (!dep_req.as_object().empty()) out.set("dependentRequired", std::move(dep_req));
      if (!dep_schemas.as_object().empty()) out.set("dependentSchemas", std::move(dep_schemas));
    }
    return out;
  }

  NodeId add_node(const JsonValue& raw, const std::string& pointer) {
    auto found = by_pointer.find(pointer);
    if (found != by_pointer.end()) return found->second;
    NodeId id = static_cast<NodeId>(ir.nodes.size());
    ir.nodes.emplace_back();
    by_pointer[pointer] = id;

    if (raw.is_boolean()) {
      ir.nodes[id].kind =
          raw.as_boolean() ? SchemaNode::Kind::BooleanTrue : SchemaNode::Kind::BooleanFalse;
      ir.nodes[id].pointer = pointer;
      return id;
    }

    JsonValue shimmed = shim(raw);
    {
      SchemaNode& node = ir.nodes[id];
      node.kind = SchemaNode::Kind::Object;
      node.pointer = pointer;
      node.raw = shimmed;
    }

    auto get = [&](std::string_view k) { return ir.nodes[id].raw.find(k); };

    if (const JsonValue* anchor = get("$anchor"); anchor && anchor->is_string()) {
      by_anchor.emplace(anchor->as_string(), id);
    }
    if (const JsonValue* ref = get("$ref"); ref && ref->is_string()) {
      pending_refs.push_back(PendingRef{id, ref->as_string()});
    }

    for (const char* kw : kSchemaValued) {
      const JsonValue* v = get(kw);
      if (!v) continue;
      if (v->is_object() || v->is_boolean()) {
        NodeId c = add_node(*v, pointer + "/" + kw);
        ir.nodes[id].schema_kw.emplace(kw, c);
      }
    }
    for (const char* kw : kSchemaListValued) {
      const JsonValue* v = get(kw);
      if (!v || !v->is_array()) continue;
      std::vector<NodeId> ids;
      const auto& arr = v->as_array();
      for (size_t i = 0; i < arr.size(); ++i) {
        ids.push_back(add_node(arr[i], pointer + "/" + kw + "/" + std::to_string(i)));
      }
      ir.nodes[id].schema_list_kw.emplace(kw, std::move(ids));
    }
    for (const char* kw : kSchemaMapValued) {
      const JsonValue* v = get(kw);
      if (!v || !v->is_object()) continue;
      std::vector<std::pair<std::string, NodeId>> entries;
      for (const auto& m : v->as_object()) {
        std::string escaped;
        for (char c : m.key) {
          if (c == '~')
            escaped += "~0";
          else if (c == '/')
            escaped += "~1";
          else
            escaped += c;
        }
        entries.emplace_back(m.key, add_node(m.value, pointer + "/" + kw + "/" + escaped));
      }
      ir.nodes[id].schema_map_kw.emplace(kw, std::move(entries));
    }

    for (const auto& m : ir.nodes[id].raw.as_object()) {
      if (!is_known_keyword(m.key)) ir.nodes[id].unknown_keywords.push_back(m.key);
    }
    return id;
  }

  void resolve_refs() {
    // Stable iteration: resolving a ref may create nodes that themselves
    // carry refs, appended to pending_refs.
    for (size_t i = 0; i < pending_refs.size(); ++i) {
      PendingRef pr = pending_refs[i];
      const std::string& target = pr.target;
      NodeId resolved;
      if (target == "#" || target.empty()) {
        resolved = ir.root;
      } else if (target.size() >= 2 && target[0] == '#' && target[1] == '/') {
        std::string pointer = percent_decode(target.substr(1));
        auto found = by_pointer.find(pointer);
        if (found != by_pointer.end()) {
          resolved = found->second;
        } else {
          const JsonValue* raw = resolve_json_pointer(doc.raw, target.substr(1));
          if (!raw || (!raw->is_object() && !raw->is_boolean())) {
            throw SchemaError(SchemaError::Code::UnresolvedExternalRef,
                              "unresolvable $ref \"" + target + "\"");
          }
          resolved = add_node(*raw, pointer);
        }
      } else if (target[0] == '#') {
        std::string anchor = percent_decode(target.substr(1));
        auto found = by_anchor.find(anchor);
        if (found == by_anchor.end()) {
          throw SchemaError(SchemaError::Code::UnresolvedExternalRef,
                            "unresolved $anchor reference \"" + target + "\"");
        }
        resolved = found->second;
      } else {
        throw SchemaError(SchemaError::Code::UnresolvedExternalRef,
                          "external reference \"" + target + "\" cannot be fetched");
      }
      ir.nodes[pr.node].ref = resolved;
    }
  }

  // A $ref chain that never reaches a concrete schema is degenerate.
  void check_pure_ref_cycles() {
    for (NodeId start = 0; start < ir.nodes.size(); ++start) {
      NodeId cur = start;
      size_t hops = 0;
      while (ir.nodes[cur].ref.has_value()) {
        cur = *ir.nodes[cur].ref;
        if (++hops > ir.nodes.size()) {
          throw SchemaError(SchemaError::Code::RefCycleTooDeep,
                            "$ref chain at " + ir.nodes[start].pointer +
                                " never reaches a concrete schema");
        }
      }
    }
  }

  // Tarjan SCC over child + ref edges; nodes in nontrivial SCCs (or with a
  // ref self-loop) are cycle participants.
  void record_cycles() {
    size_t n = ir.nodes.size();
    std::vector<std::vector<NodeId>> adj(n);
    for (NodeId id = 0; id < n; ++id) {
      const SchemaNode& node = ir.nodes[id];
      if (node.ref) adj[id].push_back(*node.ref);
      for (const auto& [k, c] : node.schema_kw) adj[id].push_back(c);
      for (const auto& [k, cs] : node.schema_list_kw)
        for (NodeId c : cs) adj[id].push_back(c);
      for (const auto& [k, cs] : node.schema_map_kw)
        for (const auto& [name, c] : cs) adj[id].push_back(c);
    }
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<NodeId> stack;
    int counter = 0;
    // iterative Tarjan
    struct Frame {
      NodeId v;
      size_t edge = 0;
    };
    for (NodeId root = 0; root < n; ++root) {
      if (index[root] != -1) continue;
      std::vector<Frame> call;
      call.push_back(Frame{root});
      index[root] = low[root] = counter++;
      stack.push_back(root);
      on_stack[root] = true;
      while (!call.empty()) {
        Frame& f = call.back();
        if (f.edge < adj[f.v].size()) {
          NodeId w = adj[f.v][f.edge++];
          if (index[w] == -1) {
            index[w] = low[w] = counter++;
            stack.push_back(w);
            on_stack[w] = true;
            call.push_back(Frame{w});
          } else if (on_stack[w]) {
            low[f.v] = std::min(low[f.v], index[w]);
          }
        } else {
          if (low[f.v] == index[f.v]) {
            std::vector<NodeId> scc;
            while (true) {
              NodeId w = stack.back();
              stack.pop_back();
              on_stack[w] = false;
              scc.push_back(w);
              if (w == f.v) break;
            }
            bool self_loop = false;
            if (scc.size() == 1) {
              for (NodeId w : adj[scc[0]])
                if (w == scc[0]) self_loop = true;
            }
            if (scc.size() > 1 || self_loop) {
              for (NodeId w : scc) {
                ir.cycle_nodes.insert(w);
                ir.cycle_pointers.insert(ir.nodes[w].pointer);
              }
            }
          }
          NodeId v = f.v;
          call.pop_back();
          if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
        }
      }
    }
  }
};

}  // namespace

SchemaIR normalize(const SchemaDocument& doc) {
  Normalizer norm{doc};
  norm.ir.source_id = doc.source_id;
  norm.ir.draft = doc.declared_draft == SchemaDraft::Unknown ? SchemaDraft::Draft2020_12
                                                             : doc.declared_draft;
  norm.ir.root = norm.add_node(doc.raw, "");
  norm.resolve_refs();
  norm.check_pure_ref_cycles();
  norm.record_cycles();
  return norm.ir;
}

// ---------------------------------------------------------------------------
// Field counting
// ---------------------------------------------------------------------------

namespace {

uint64_t count_keys(const JsonValue& v) {
  uint64_t total = 0;
  if (v.is_object()) {
    total += v.as_object().size();
    for (const auto& m : v.as_object()) total += count_keys(m.value);
  } else if (v.is_array()) {
    for (const auto& item : v.as_array()) total += count_keys(item);
  }
  return total;
}

}  // namespace

uint64_t count_fields(const SchemaDocument& doc) { return count_keys(doc.raw); }

size_t utf8_length(std::string_view s) {
  size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

}  // namespace tokengate
