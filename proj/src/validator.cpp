/*!
 * Copyright (c) 2026 by Contributors
 * \file src/validator.cpp
 * \brief Keyword-by-keyword instance validation.
 */
#include "tokengate/validator.hpp"

#include <algorithm>

#include "tokengate/formats.hpp"

namespace tokengate {

namespace {

// Keywords that would silently weaken validation if skipped.
const char* kUnsupported[] = {"unevaluatedItems", "unevaluatedProperties", "$dynamicRef",
                              "$recursiveRef",    "$vocabulary"};

bool type_matches(const std::string& name, const JsonValue& v) {
  if (name == "null") return v.is_null();
  if (name == "boolean") return v.is_boolean();
  if (name == "string") return v.is_string();
  if (name == "array") return v.is_array();
  if (name == "object") return v.is_object();
  if (name == "number") return v.is_number();
  if (name == "integer") return v.is_number() && v.as_number().is_integer();
  return false;
}

std::string join_path(const std::string& base, const std::string& token) {
  std::string escaped;
  for (char c : token) {
    if (c == '~')
      escaped += "~0";
    else if (c == '/')
      escaped += "~1";
    else
      escaped += c;
  }
  return base + "/" + escaped;
}

}  // namespace

const std::set<std::string>& Validator::supported_keywords() {
  static const std::set<std::string> kws = {
      "type",          "enum",
      "const",         "multipleOf",
      "maximum",       "exclusiveMaximum",
      "minimum",       "exclusiveMinimum",
      "maxLength",     "minLength",
      "pattern",       "format",
      "items",         "prefixItems",
      "maxItems",      "minItems",
      "uniqueItems",   "contains",
      "maxContains",   "minContains",
      "maxProperties", "minProperties",
      "required",      "properties",
      "patternProperties", "additionalProperties",
      "propertyNames", "dependentRequired",
      "dependentSchemas", "allOf",
      "anyOf",         "oneOf",
      "not",           "if",
      "then",          "else",
      "$ref",
  };
  return kws;
}

Validator::Validator(SchemaIR ir) : ir_(std::move(ir)) {
  patterns_.resize(ir_.nodes.size());
  RegexOptions containment;
  containment.containment = true;
  for (NodeId id = 0; id < ir_.nodes.size(); ++id) {
    const SchemaNode& node = ir_.nodes[id];
    if (node.kind != SchemaNode::Kind::Object) continue;
    if (const JsonValue* p = node.keyword("pattern"); p && p->is_string()) {
      try {
        patterns_[id].pattern = compile_regex(p->as_string(), containment);
      } catch (const RegexError& e) {
        patterns_[id].pattern_error = e.what();
      }
    }
    if (const auto* pp = node.child_map("patternProperties")) {
      for (const auto& [name, child] : *pp) {
        try {
          patterns_[id].pattern_properties.emplace_back(name, compile_regex(name, containment));
        } catch (const RegexError& e) {
          patterns_[id].pattern_properties.emplace_back(name, nullptr);
          patterns_[id].pattern_properties_error = e.what();
        }
      }
    }
  }
}

struct Validator::EvalContext {
  std::vector<Violation>* violations;
  // (node, instance address) pairs currently being evaluated; re-entry means
  // a reference cycle with no instance progress, which can never derive
  // validity (least-fixed-point semantics).
  std::set<std::pair<NodeId, const JsonValue*>> active;
  bool collect = true;
};

bool Validator::eval(NodeId id, const JsonValue& inst, const std::string& path,
                     EvalContext& ctx) const {
  const SchemaNode& node = ir_.nodes[id];
  if (node.kind == SchemaNode::Kind::BooleanTrue) return true;
  if (node.kind == SchemaNode::Kind::BooleanFalse) {
    if (ctx.collect)
      ctx.violations->push_back({path, "false", "schema forbids all instances"});
    return false;
  }

  for (const char* kw : kUnsupported) {
    if (node.keyword(kw)) {
      throw SchemaError(SchemaError::Code::UnsupportedKeyword,
                        std::string("unsupported keyword '") + kw + "' at " +
                            (node.pointer.empty() ? "#" : node.pointer));
    }
  }
  if (!patterns_[id].pattern_error.empty()) {
    throw SchemaError(SchemaError::Code::UnsupportedKeyword,
                      "unsupported pattern at " + node.pointer + ": " +
                          patterns_[id].pattern_error);
  }
  if (!patterns_[id].pattern_properties_error.empty()) {
    throw SchemaError(SchemaError::Code::UnsupportedKeyword,
                      "unsupported patternProperties regex at " + node.pointer + ": " +
                          patterns_[id].pattern_properties_error);
  }

  auto key = std::make_pair(id, &inst);
  if (!ctx.active.insert(key).second) {
    if (ctx.collect)
      ctx.violations->push_back({path, "$ref", "recursive schema re-entered without progress"});
    return false;
  }
  struct ActiveGuard {
    EvalContext& ctx;
    std::pair<NodeId, const JsonValue*> key;
    ~ActiveGuard() { ctx.active.erase(key); }
  } guard{ctx, key};

  bool ok = true;
  auto violate = [&](const char* kw, std::string msg) {
    ok = false;
    if (ctx.collect) ctx.violations->push_back({path, kw, std::move(msg)});
  };
  // Evaluates a subschema silently (no violation reporting).
  auto probe = [&](NodeId child, const JsonValue& v, const std::string& p) {
    bool saved = ctx.collect;
    ctx.collect = false;
    bool r = eval(child, v, p, ctx);
    ctx.collect = saved;
    return r;
  };

  if (node.ref) {
    if (!eval(*node.ref, inst, path, ctx)) ok = false;
  }

  if (const JsonValue* t = node.keyword("type")) {
    bool match = false;
    if (t->is_string()) {
      match = type_matches(t->as_string(), inst);
    } else if (t->is_array()) {
      for (const auto& alt : t->as_array())
        if (alt.is_string() && type_matches(alt.as_string(), inst)) match = true;
    }
    if (!match) violate("type", "instance type not allowed");
  }

  if (const JsonValue* e = node.keyword("enum"); e && e->is_array()) {
    bool found = false;
    for (const auto& cand : e->as_array())
      if (cand == inst) found = true;
    if (!found) violate("enum", "instance not among enum values");
  }

  if (const JsonValue* c = node.keyword("const")) {
    if (!(*c == inst)) violate("const", "instance differs from const value");
  }

  if (inst.is_number()) {
    const Decimal& num = inst.as_number();
    if (const JsonValue* m = node.keyword("multipleOf"); m && m->is_number()) {
      if (m->as_number().is_zero() || m->as_number().negative ||
          !num.is_multiple_of(m->as_number()))
        violate("multipleOf", "number is not a multiple of " + m->as_number().to_string());
    }
    if (const JsonValue* b = node.keyword("minimum"); b && b->is_number()) {
      if (num.compare(b->as_number()) < 0) violate("minimum", "number below minimum");
    }
    if (const JsonValue* b = node.keyword("maximum"); b && b->is_number()) {
      if (num.compare(b->as_number()) > 0) violate("maximum", "number above maximum");
    }
    if (const JsonValue* b = node.keyword("exclusiveMinimum"); b && b->is_number()) {
      if (num.compare(b->as_number()) <= 0)
        violate("exclusiveMinimum", "number not above exclusive minimum");
    }
    if (const JsonValue* b = node.keyword("exclusiveMaximum"); b && b->is_number()) {
      if (num.compare(b->as_number()) >= 0)
        violate("exclusiveMaximum", "number not below exclusive maximum");
    }
  }

  if (inst.is_string()) {
    const std::string& s = inst.as_string();
    if (const JsonValue* b = node.keyword("minLength"); b && b->is_number()) {
      if (auto n = b->as_number().to_int64(); n && static_cast<int64_t>(utf8_length(s)) < *n)
        violate("minLength", "string shorter than minLength");
    }
    if (const JsonValue* b = node.keyword("maxLength"); b && b->is_number()) {
      if (auto n = b->as_number().to_int64(); n && static_cast<int64_t>(utf8_length(s)) > *n)
        violate("maxLength", "string longer than maxLength");
    }
    if (patterns_[id].pattern) {
      if (!regex_matches(*patterns_[id].pattern, s)) violate("pattern", "pattern not matched");
    }
    if (const JsonValue* f = node.keyword("format"); f && f->is_string()) {
      if (!format_check(f->as_string(), s))
        violate("format", "string is not a valid " + f->as_string());
    }
  }

  if (inst.is_array()) {
    const auto& items = inst.as_array();
    size_t prefix_len = 0;
    if (const auto* prefix = node.child_list("prefixItems")) {
      prefix_len = prefix->size();
      for (size_t i = 0; i < items.size() && i < prefix->size(); ++i) {
        if (!eval((*prefix)[i], items[i], join_path(path, std::to_string(i)), ctx)) ok = false;
      }
    }
    if (auto tail = node.child("items")) {
      for (size_t i = prefix_len; i < items.size(); ++i) {
        if (!eval(*tail, items[i], join_path(path, std::to_string(i)), ctx)) ok = false;
      }
    }
    if (const JsonValue* b = node.keyword("minItems"); b && b->is_number()) {
      if (auto n = b->as_number().to_int64(); n && static_cast<int64_t>(items.size()) < *n)
        violate("minItems", "array has too few items");
    }
    if (const JsonValue* b = node.keyword("maxItems"); b && b->is_number()) {
      if (auto n = b->as_number().to_int64(); n && static_cast<int64_t>(items.size()) > *n)
        violate("maxItems", "array has too many items");
    }
    if (const JsonValue* u = node.keyword("uniqueItems"); u && u->is_boolean() && u->as_boolean()) {
      for (size_t i = 0; i < items.size() && ok; ++i)
        for (size_t j = i + 1; j < items.size(); ++j)
          if (items[i] == items[j]) {
            violate("uniqueItems", "duplicate array items at " + std::to_string(i) + " and " +
                                       std::to_string(j));
            break;
          }
    }
    if (auto contains = node.child("contains")) {
      int64_t matched = 0;
      for (size_t i = 0; i < items.size(); ++i)
        if (probe(*contains, items[i], join_path(path, std::to_string(i)))) ++matched;
      int64_t min_contains = 1, max_contains = -1;
      if (const JsonValue* b = node.keyword("minContains"); b && b->is_number())
        min_contains = b->as_number().to_int64().value_or(1);
      if (const JsonValue* b = node.keyword("maxContains"); b && b->is_number())
        max_contains = b->as_number().to_int64().value_or(-1);
      if (matched < min_contains) violate("contains", "too few matching items");
      if (max_contains >= 0 && matched > max_contains)
        violate("maxContains", "too many matching items");
    }
  }

  if (inst.is_object()) {
    const auto& members = inst.as_object();
    if (const JsonValue* req = node.keyword("required"); req && req->is_array()) {
      for (const auto& r : req->as_array()) {
        if (r.is_string() && !inst.find(r.as_string()))
          violate("required", "missing required property \"" + r.as_string() + "\"");
      }
    }
    if (const JsonValue* b = node.keyword("minProperties"); b && b->is_number()) {
      if (auto n = b->as_number().to_int64(); n && static_cast<int64_t>(members.size()) < *n)
        violate("minProperties", "object has too few properties");
    }
    if (const JsonValue* b = node.keyword("maxProperties"); b && b->is_number()) {
      if (auto n = b->as_number().to_int64(); n && static_cast<int64_t>(members.size()) > *n)
        violate("maxProperties", "object has too many properties");
    }
    const auto* props = node.child_map("properties");
    const auto& pattern_props = patterns_[id].pattern_properties;
    const auto* pattern_children = node.child_map("patternProperties");
    auto additional = node.child("additionalProperties");
    for (const auto& m : members) {
      bool applied = false;
      if (props) {
        for (const auto& [name, child] : *props) {
          if (name == m.key) {
            applied = true;
            if (!eval(child, m.value, join_path(path, m.key), ctx)) ok = false;
          }
        }
      }
      for (size_t pi = 0; pi < pattern_props.size(); ++pi) {
        if (regex_matches(*pattern_props[pi].second, m.key)) {
          applied = true;
          if (pattern_children && pi < pattern_children->size()) {
            if (!eval((*pattern_children)[pi].second, m.value, join_path(path, m.key), ctx))
              ok = false;
          }
        }
      }
      if (!applied && additional) {
        if (!eval(*additional, m.value, join_path(path, m.key), ctx)) ok = false;
      }
    }
    if (auto names = node.child("propertyNames")) {
      for (const auto& m : members) {
        JsonValue key_value = JsonValue::string(m.key);
        if (!eval(*names, key_value, join_path(path, m.key), ctx)) ok = false;
      }
    }
    if (const JsonValue* dr = node.keyword("dependentRequired"); dr && dr->is_object()) {
      for (const auto& dep : dr->as_object()) {
        if (!inst.find(dep.key) || !dep.value.is_array()) continue;
        for (const auto& r : dep.value.as_array()) {
          if (r.is_string() && !inst.find(r.as_string()))
            violate("dependentRequired", "property \"" + dep.key + "\" requires \"" +
                                             r.as_string() + "\"");
        }
      }
    }
    if (const auto* ds = node.child_map("dependentSchemas")) {
      for (const auto& [name, child] : *ds) {
        if (inst.find(name)) {
          if (!eval(child, inst, path, ctx)) ok = false;
        }
      }
    }
  }

  if (const auto* all = node.child_list("allOf")) {
    for (NodeId child : *all)
      if (!eval(child, inst, path, ctx)) ok = false;
  }
  if (const auto* any = node.child_list("anyOf")) {
    bool hit = false;
    for (NodeId child : *any)
      if (probe(child, inst, path)) hit = true;
    if (!hit) violate("anyOf", "no anyOf branch matched");
  }
  if (const auto* one = node.child_list("oneOf")) {
    int hits = 0;
    for (NodeId child : *one)
      if (probe(child, inst, path)) ++hits;
    if (hits != 1)
      violate("oneOf", std::to_string(hits) + " oneOf branches matched, expected exactly 1");
  }
  if (auto not_child = node.child("not")) {
    if (probe(*not_child, inst, path)) violate("not", "instance matches forbidden schema");
  }
  if (auto if_child = node.child("if")) {
    if (probe(*if_child, inst, path)) {
      if (auto then_child = node.child("then"))
        if (!eval(*then_child, inst, path, ctx)) ok = false;
    } else {
      if (auto else_child = node.child("else"))
        if (!eval(*else_child, inst, path, ctx)) ok = false;
    }
  }

  return ok;
}

ValidationOutcome Validator::validate(const JsonValue& instance) const {
  return validate_at(ir_.root, instance);
}

ValidationOutcome Validator::validate_at(NodeId start, const JsonValue& instance) const {
  ValidationOutcome outcome;
  EvalContext ctx{&outcome.violations, {}, true};
  outcome.valid = eval(start, instance, "", ctx);
  if (outcome.valid) outcome.violations.clear();
  return outcome;
}

ValidationOutcome validate_instance(const SchemaIR& ir, const JsonValue& instance) {
  Validator v(ir);
  return v.validate(instance);
}

}  // namespace tokengate
