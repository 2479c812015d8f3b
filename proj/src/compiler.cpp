/*!
 * Copyright (c) 2026 by Contributors
 * \file src/compiler.cpp
 * \brief Lowering of schema IR into the constraint automaton.
 *
 * A value position is lowered from a conjunction of IR nodes ($ref targets
 * and allOf members fold in). Disjunctions (anyOf/oneOf) distribute one
 * group at a time: the carrier is replaced by a synthetic residual node with
 * the group removed, and each branch joins the conjunction. Recursive
 * re-entry lands on the memoized placeholder, giving least-fixed-point
 * semantics (the matcher drops self-referential union branches at runtime).
 */
#include "tokengate/compiler.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>

#include "tokengate/formats.hpp"
#include "tokengate/validator.hpp"

namespace tokengate {

// ---------------------------------------------------------------------------
// KeywordManifest
// ---------------------------------------------------------------------------

void KeywordManifest::set(const std::string& keyword, Level level, std::string condition) {
  entries_[keyword] = Support{level, std::move(condition)};
}

std::optional<KeywordManifest::Support> KeywordManifest::lookup(std::string_view keyword) const {
  auto it = entries_.find(std::string(keyword));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

KeywordManifest KeywordManifest::default_v1() {
  KeywordManifest m;
  m.version_ = "v1";
  for (const char* kw :
       {"$schema", "$id", "$comment", "$defs", "definitions", "$anchor", "$ref", "type", "enum",
        "const", "properties", "required", "additionalProperties", "items", "prefixItems",
        "minItems", "maxItems", "minLength", "maxLength", "minProperties", "maxProperties",
        "anyOf", "title", "description", "default", "examples", "deprecated", "readOnly",
        "writeOnly", "contentMediaType", "contentEncoding", "contentSchema"})
    m.set(kw, Level::Full);
  m.set("allOf", Level::Partial, "merge-compatible conjunctions");
  m.set("oneOf", Level::Partial, "compiled as anyOf union; exclusivity unenforced (divergent)");
  m.set("pattern", Level::Partial, "supported regex subset");
  m.set("format", Level::Partial,
        "asserted: date-time date time email uri uuid ipv4 ipv6; other values ignored");
  for (const char* kw : {"minimum", "maximum", "exclusiveMinimum", "exclusiveMaximum"})
    m.set(kw, Level::Partial, "integer-typed schemas with 64-bit bounds");
  for (const char* kw :
       {"not", "if", "then", "else", "multipleOf", "uniqueItems", "contains", "minContains",
        "maxContains", "patternProperties", "propertyNames", "dependentRequired",
        "dependentSchemas", "dependencies", "unevaluatedItems", "unevaluatedProperties",
        "$dynamicRef", "$dynamicAnchor", "$recursiveRef", "$recursiveAnchor", "$vocabulary"})
    m.set(kw, Level::None);
  return m;
}

KeywordManifest KeywordManifest::from_json(const JsonValue& doc) {
  KeywordManifest m;
  m.entries_.clear();
  if (const JsonValue* v = doc.find("version"); v && v->is_string()) m.version_ = v->as_string();
  const JsonValue* kws = doc.find("keywords");
  if (!kws || !kws->is_object())
    throw SchemaError(SchemaError::Code::MalformedJson, "manifest missing 'keywords' object");
  for (const auto& member : kws->as_object()) {
    if (!member.value.is_string())
      throw SchemaError(SchemaError::Code::MalformedJson,
                        "manifest entry for '" + member.key + "' must be a string");
    const std::string& s = member.value.as_string();
    if (s == "full") {
      m.set(member.key, Level::Full);
    } else if (s == "none") {
      m.set(member.key, Level::None);
    } else if (s.rfind("partial:", 0) == 0) {
      m.set(member.key, Level::Partial, s.substr(8));
    } else {
      throw SchemaError(SchemaError::Code::MalformedJson,
                        "manifest entry for '" + member.key + "' has bad level \"" + s + "\"");
    }
  }
  return m;
}

JsonValue KeywordManifest::to_json() const {
  JsonValue kws = JsonValue::object();
  for (const auto& [kw, support] : entries_) {
    std::string s;
    switch (support.level) {
      case Level::Full: s = "full"; break;
      case Level::None: s = "none"; break;
      case Level::Partial: s = "partial:" + support.condition; break;
    }
    kws.set(kw, JsonValue::string(s));
  }
  JsonValue doc = JsonValue::object();
  doc.set("version", JsonValue::string(version_));
  doc.set("keywords", std::move(kws));
  return doc;
}

namespace {

// ---------------------------------------------------------------------------
// Decimal -> integer bound helpers
// ---------------------------------------------------------------------------

struct BoundOverflow {};
struct CompileTimeout {};

// Largest integer <= d as int64; throws BoundOverflow outside int64.
int64_t decimal_floor(const Decimal& d) {
  if (d.is_integer()) {
    if (auto v = d.to_int64()) return *v;
    throw BoundOverflow{};
  }
  int64_t point = static_cast<int64_t>(d.digits.size()) + d.exponent;
  Decimal trunc;
  trunc.negative = false;
  if (point <= 0) {
    trunc.digits = "0";
  } else {
    trunc.digits = d.digits.substr(0, static_cast<size_t>(point));
    size_t first = trunc.digits.find_first_not_of('0');
    trunc.digits = first == std::string::npos ? "0" : trunc.digits.substr(first);
  }
  trunc.exponent = 0;
  auto v = trunc.to_int64();
  if (!v) throw BoundOverflow{};
  // truncation rounds toward zero; floor of a negative non-integer is one less
  return d.negative ? -*v - 1 : *v;
}

int64_t decimal_ceil(const Decimal& d) {
  if (d.is_integer()) {
    if (auto v = d.to_int64()) return *v;
    throw BoundOverflow{};
  }
  Decimal neg = d;
  neg.negative = !neg.negative;
  int64_t f = decimal_floor(neg);
  return -f;
}

// ---------------------------------------------------------------------------
// Effective conjunction
// ---------------------------------------------------------------------------

enum TypeBit : uint32_t {
  kTNull = 1u << 0,
  kTBoolean = 1u << 1,
  kTInteger = 1u << 2,   // integer-valued numbers
  kTFraction = 1u << 3,  // numbers with fractional/exponent forms
  kTString = 1u << 4,
  kTArray = 1u << 5,
  kTObject = 1u << 6,
};
constexpr uint32_t kAllTypes = 0x7F;

uint32_t type_name_bits(const std::string& name) {
  if (name == "null") return kTNull;
  if (name == "boolean") return kTBoolean;
  if (name == "integer") return kTInteger;
  if (name == "number") return kTInteger | kTFraction;
  if (name == "string") return kTString;
  if (name == "array") return kTArray;
  if (name == "object") return kTObject;
  return 0;
}

struct ObjSide {
  std::vector<std::pair<std::string, NodeId>> props;
  enum class Add : uint8_t { Absent, AnyTrue, Forbidden, Schema } add = Add::Absent;
  NodeId add_schema = 0;
};

struct ArrSide {
  std::vector<NodeId> prefix;
  enum class Tail : uint8_t { Absent, Schema, Forbidden } tail = Tail::Absent;
  NodeId tail_schema = 0;
};

struct Disjunction {
  NodeId carrier;
  std::string keyword;  // "anyOf" or "oneOf"
  std::vector<NodeId> branches;
};

struct Eff {
  bool never = false;
  uint32_t types = kAllTypes;
  bool enum_constrained = false;
  std::vector<JsonValue> enum_values;
  std::optional<Decimal> min_d, max_d, exmin_d, exmax_d;
  std::vector<std::pair<std::string, std::string>> bound_uses;  // (pointer, keyword)
  uint32_t min_len = 0, max_len = UINT32_MAX;
  std::vector<std::shared_ptr<const ByteNfa>> patterns;
  std::vector<std::shared_ptr<const ByteNfa>> formats;
  std::vector<ObjSide> obj_sides;
  std::set<std::string> required;
  uint32_t min_props = 0, max_props = UINT32_MAX;
  std::vector<ArrSide> arr_sides;
  uint32_t min_items = 0, max_items = UINT32_MAX;
  std::vector<Disjunction> disjunctions;  // in discovery order
  std::vector<NodeId> real_parts;         // original node ids, for enum filtering
};

// ---------------------------------------------------------------------------
// Lowering
// ---------------------------------------------------------------------------

struct Lowering {
  const SchemaIR& ir;
  const KeywordManifest& manifest;
  ConstraintAutomaton& out;
  const CompileOptions& opts;
  std::chrono::steady_clock::time_point deadline;

  std::vector<UnsupportedUse> problems;
  std::set<std::pair<std::string, std::string>> problem_keys;

  // Synthetic residual nodes (carrier minus one distributed disjunction).
  std::vector<SchemaNode> extra_nodes;
  // real origin of each synthetic node (for enum filtering)
  std::vector<NodeId> extra_origin;
  std::map<std::pair<NodeId, std::string>, NodeId> residual_cache;

  std::map<std::vector<NodeId>, CNodeId> memo;
  std::set<CNodeId> finished;

  std::unique_ptr<Validator> validator;
  CNodeId never_id = 0;

  const SchemaNode& node(NodeId id) const {
    return id < ir.nodes.size() ? ir.nodes[id] : extra_nodes[id - ir.nodes.size()];
  }
  NodeId origin(NodeId id) const {
    return id < ir.nodes.size() ? id : extra_origin[id - ir.nodes.size()];
  }

  void check_deadline() {
    if (std::chrono::steady_clock::now() > deadline) throw CompileTimeout{};
    if (out.nodes.size() > opts.max_nodes) throw CompileTimeout{};
  }

  void problem(const std::string& pointer, const std::string& keyword, std::string detail) {
    std::string path = pointer + "/" + keyword;
    if (problem_keys.emplace(path, keyword).second)
      problems.push_back(UnsupportedUse{path, keyword, std::move(detail)});
  }

  NodeId residual(NodeId carrier, const std::string& kw) {
    auto key = std::make_pair(carrier, kw);
    auto it = residual_cache.find(key);
    if (it != residual_cache.end()) return it->second;
    SchemaNode res = node(carrier);
    res.schema_list_kw.erase(kw);
    if (res.raw.is_object()) {
      JsonValue raw = JsonValue::object();
      for (const auto& m : res.raw.as_object())
        if (m.key != kw) raw.set(m.key, m.value);
      res.raw = std::move(raw);
    }
    NodeId id = static_cast<NodeId>(ir.nodes.size() + extra_nodes.size());
    NodeId orig = origin(carrier);
    extra_nodes.push_back(std::move(res));
    extra_origin.push_back(orig);
    residual_cache[key] = id;
    return id;
  }

  // --- constraint folding -------------------------------------------------

  void fold_keyword_support(const SchemaNode& n) {
    if (n.kind != SchemaNode::Kind::Object) return;
    for (const auto& m : n.raw.as_object()) {
      auto support = manifest.lookup(m.key);
      if (!support) continue;  // annotation
      if (support->level == KeywordManifest::Level::None)
        problem(n.pointer, m.key, "keyword not supported by the grammar");
    }
  }

  void fold(Eff& eff, NodeId id, std::vector<NodeId>& visited) {
    if (std::find(visited.begin(), visited.end(), id) != visited.end()) return;
    visited.push_back(id);
    const SchemaNode& n = node(id);
    if (n.kind == SchemaNode::Kind::BooleanTrue) return;
    if (n.kind == SchemaNode::Kind::BooleanFalse) {
      eff.never = true;
      return;
    }
    eff.real_parts.push_back(origin(id));
    fold_keyword_support(n);

    if (const JsonValue* t = n.keyword("type")) {
      uint32_t bits = 0;
      if (t->is_string()) {
        bits = type_name_bits(t->as_string());
      } else if (t->is_array()) {
        for (const auto& alt : t->as_array())
          if (alt.is_string()) bits |= type_name_bits(alt.as_string());
      } else {
        bits = kAllTypes;
      }
      eff.types &= bits;
    }

    if (const JsonValue* e = n.keyword("enum"); e && e->is_array()) {
      if (!eff.enum_constrained) {
        eff.enum_constrained = true;
        eff.enum_values = e->as_array();
      } else {
        std::vector<JsonValue> kept;
        for (const auto& v : eff.enum_values) {
          for (const auto& cand : e->as_array())
            if (v == cand) {
              kept.push_back(v);
              break;
            }
        }
        eff.enum_values = std::move(kept);
      }
    }
    if (const JsonValue* c = n.keyword("const")) {
      if (!eff.enum_constrained) {
        eff.enum_constrained = true;
        eff.enum_values = {*c};
      } else {
        std::vector<JsonValue> kept;
        for (const auto& v : eff.enum_values)
          if (v == *c) kept.push_back(v);
        eff.enum_values = std::move(kept);
      }
    }

    auto fold_min = [&](std::optional<Decimal>& slot, const char* kw) {
      const JsonValue* v = n.keyword(kw);
      if (!v || !v->is_number()) return;
      eff.bound_uses.emplace_back(n.pointer, kw);
      if (!slot || slot->compare(v->as_number()) < 0) slot = v->as_number();
    };
    auto fold_max = [&](std::optional<Decimal>& slot, const char* kw) {
      const JsonValue* v = n.keyword(kw);
      if (!v || !v->is_number()) return;
      eff.bound_uses.emplace_back(n.pointer, kw);
      if (!slot || slot->compare(v->as_number()) > 0) slot = v->as_number();
    };
    fold_min(eff.min_d, "minimum");
    fold_min(eff.exmin_d, "exclusiveMinimum");
    fold_max(eff.max_d, "maximum");
    fold_max(eff.exmax_d, "exclusiveMaximum");

    auto as_u32 = [](const JsonValue* v, uint32_t fallback) -> uint32_t {
      if (!v || !v->is_number()) return fallback;
      auto i = v->as_number().to_int64();
      if (!i) return fallback;
      if (*i < 0) return 0;
      if (*i > UINT32_MAX) return UINT32_MAX;
      return static_cast<uint32_t>(*i);
    };
    if (const JsonValue* v = n.keyword("minLength")) eff.min_len = std::max(eff.min_len, as_u32(v, 0));
    if (const JsonValue* v = n.keyword("maxLength"))
      eff.max_len = std::min(eff.max_len, as_u32(v, UINT32_MAX));
    if (const JsonValue* v = n.keyword("minItems")) eff.min_items = std::max(eff.min_items, as_u32(v, 0));
    if (const JsonValue* v = n.keyword("maxItems"))
      eff.max_items = std::min(eff.max_items, as_u32(v, UINT32_MAX));
    if (const JsonValue* v = n.keyword("minProperties"))
      eff.min_props = std::max(eff.min_props, as_u32(v, 0));
    if (const JsonValue* v = n.keyword("maxProperties"))
      eff.max_props = std::min(eff.max_props, as_u32(v, UINT32_MAX));

    if (const JsonValue* p = n.keyword("pattern"); p && p->is_string()) {
      RegexOptions ropts;
      ropts.containment = true;
      try {
        eff.patterns.push_back(compile_regex(p->as_string(), ropts));
      } catch (const RegexError& e) {
        problem(n.pointer, "pattern", e.what());
      }
    }
    if (const JsonValue* f = n.keyword("format"); f && f->is_string()) {
      if (auto nfa = format_nfa(f->as_string())) eff.formats.push_back(std::move(nfa));
    }

    if (const JsonValue* req = n.keyword("required"); req && req->is_array()) {
      for (const auto& r : req->as_array())
        if (r.is_string()) eff.required.insert(r.as_string());
    }

    bool has_object_side = n.child_map("properties") || n.child("additionalProperties");
    if (has_object_side) {
      ObjSide side;
      if (const auto* props = n.child_map("properties")) side.props = *props;
      if (auto add = n.child("additionalProperties")) {
        const SchemaNode& addn = node(*add);
        if (addn.kind == SchemaNode::Kind::BooleanFalse)
          side.add = ObjSide::Add::Forbidden;
        else if (addn.kind == SchemaNode::Kind::BooleanTrue)
          side.add = ObjSide::Add::AnyTrue;
        else {
          side.add = ObjSide::Add::Schema;
          side.add_schema = *add;
        }
      }
      eff.obj_sides.push_back(std::move(side));
    }

    bool has_array_side = n.child_list("prefixItems") || n.child("items");
    if (has_array_side) {
      ArrSide side;
      if (const auto* prefix = n.child_list("prefixItems")) side.prefix = *prefix;
      if (auto tail = n.child("items")) {
        const SchemaNode& tn = node(*tail);
        if (tn.kind == SchemaNode::Kind::BooleanFalse)
          side.tail = ArrSide::Tail::Forbidden;
        else if (tn.kind == SchemaNode::Kind::BooleanTrue)
          side.tail = ArrSide::Tail::Absent;
        else {
          side.tail = ArrSide::Tail::Schema;
          side.tail_schema = *tail;
        }
      }
      eff.arr_sides.push_back(std::move(side));
    }

    for (const char* kw : {"anyOf", "oneOf"}) {
      if (const auto* list = n.child_list(kw); list && !list->empty()) {
        eff.disjunctions.push_back(Disjunction{id, kw, *list});
      }
    }

    if (const auto* all = n.child_list("allOf")) {
      for (NodeId child : *all) fold(eff, child, visited);
    }
    if (n.ref) fold(eff, *n.ref, visited);
  }

  // --- emission -----------------------------------------------------------

  CNodeId new_node() {
    out.nodes.emplace_back();
    return static_cast<CNodeId>(out.nodes.size() - 1);
  }

  CNodeId literal_node(std::string bytes) {
    CNodeId id = new_node();
    out.nodes[id].kind = CompiledNode::Kind::Literal;
    out.nodes[id].literal = std::move(bytes);
    finished.insert(id);
    return id;
  }

  bool is_finished_never(CNodeId id) const {
    return finished.count(id) && out.nodes[id].kind == CompiledNode::Kind::Never;
  }

  Validator& get_validator() {
    if (!validator) validator = std::make_unique<Validator>(ir);
    return *validator;
  }

  // Builds the key trie for an object node in place.
  void build_key_trie(CompiledNode& n) {
    n.key_trie.clear();
    n.key_trie.emplace_back();
    for (size_t pi = 0; pi < n.properties.size(); ++pi) {
      uint32_t cur = 0;
      for (unsigned char b : n.properties[pi].name) {
        uint32_t next = UINT32_MAX;
        for (const auto& [eb, child] : n.key_trie[cur].edges)
          if (eb == b) next = child;
        if (next == UINT32_MAX) {
          next = static_cast<uint32_t>(n.key_trie.size());
          n.key_trie[cur].edges.emplace_back(b, next);
          n.key_trie.emplace_back();
        }
        cur = next;
      }
      n.key_trie[cur].terminal = static_cast<int32_t>(pi);
    }
  }

  CNodeId lower_conj(std::vector<NodeId> conjuncts) {
    check_deadline();
    std::sort(conjuncts.begin(), conjuncts.end());
    conjuncts.erase(std::unique(conjuncts.begin(), conjuncts.end()), conjuncts.end());
    auto found = memo.find(conjuncts);
    if (found != memo.end()) return found->second;
    CNodeId slot = new_node();  // Never placeholder until finished
    memo[conjuncts] = slot;

    Eff eff;
    std::vector<NodeId> visited;
    for (NodeId id : conjuncts) fold(eff, id, visited);

    if (eff.never) {
      finished.insert(slot);
      return slot;  // stays Never
    }

    // Enum/const bounds the language to finitely many literals; the
    // validator (a superset of the manifest) decides which survive the rest
    // of the conjunction, including any distributed groups.
    if (eff.enum_constrained) {
      std::vector<CNodeId> lits;
      for (const auto& v : eff.enum_values) {
        bool ok = true;
        for (NodeId part : eff.real_parts) {
          if (!get_validator().validate_at(part, v).valid) {
            ok = false;
            break;
          }
        }
        if (ok) lits.push_back(literal_node(v.serialize()));
      }
      if (lits.empty()) {
        // stays Never
      } else if (lits.size() == 1) {
        out.nodes[slot] = out.nodes[lits[0]];
      } else {
        out.nodes[slot].kind = CompiledNode::Kind::Union;
        out.nodes[slot].branches = std::move(lits);
      }
      finished.insert(slot);
      return slot;
    }

    // Distribute the first disjunction not already satisfied by an asserted
    // branch. An asserted branch makes the whole group redundant.
    for (const Disjunction& group : eff.disjunctions) {
      bool absorbed = false;
      for (NodeId b : group.branches)
        if (std::binary_search(conjuncts.begin(), conjuncts.end(), b)) absorbed = true;
      if (absorbed) continue;
      NodeId res = residual(group.carrier, group.keyword);
      std::vector<CNodeId> branches;
      for (NodeId b : group.branches) {
        std::vector<NodeId> sub = conjuncts;
        sub.erase(std::remove(sub.begin(), sub.end(), group.carrier), sub.end());
        sub.push_back(res);
        sub.push_back(b);
        branches.push_back(lower_conj(std::move(sub)));
      }
      out.nodes[slot].kind = CompiledNode::Kind::Union;
      out.nodes[slot].branches = std::move(branches);
      finished.insert(slot);
      return slot;
    }

    emit_concrete(eff, slot);
    finished.insert(slot);
    return slot;
  }

  void emit_concrete(const Eff& eff, CNodeId slot) {
    std::vector<CNodeId> branches;

    if (eff.types & kTNull) branches.push_back(literal_node("null"));
    if (eff.types & kTBoolean) {
      branches.push_back(literal_node("true"));
      branches.push_back(literal_node("false"));
    }

    bool has_bounds = eff.min_d || eff.max_d || eff.exmin_d || eff.exmax_d;
    if (has_bounds && (eff.types & kTFraction)) {
      for (const auto& [pointer, kw] : eff.bound_uses)
        problem(pointer, kw, "numeric bounds supported only for integer-typed schemas");
    }
    if ((eff.types & kTInteger) && (eff.types & kTFraction)) {
      CNodeId id = new_node();
      out.nodes[id].kind = CompiledNode::Kind::Number;
      finished.insert(id);
      branches.push_back(id);
    } else if (eff.types & kTInteger) {
      std::optional<int64_t> lo, hi;
      try {
        if (eff.min_d) lo = decimal_ceil(*eff.min_d);
        if (eff.exmin_d) {
          int64_t v = decimal_floor(*eff.exmin_d);
          if (v == INT64_MAX) throw BoundOverflow{};
          lo = lo ? std::max(*lo, v + 1) : v + 1;
        }
        if (eff.max_d) hi = decimal_floor(*eff.max_d);
        if (eff.exmax_d) {
          int64_t v = decimal_ceil(*eff.exmax_d);
          if (v == INT64_MIN) throw BoundOverflow{};
          hi = hi ? std::min(*hi, v - 1) : v - 1;
        }
        if (!lo || !hi || *lo <= *hi) {
          CNodeId id = new_node();
          out.nodes[id].kind = CompiledNode::Kind::Integer;
          out.nodes[id].int_min = lo;
          out.nodes[id].int_max = hi;
          finished.insert(id);
          branches.push_back(id);
        }
        // lo > hi: empty integer branch, dropped
      } catch (const BoundOverflow&) {
        for (const auto& [pointer, kw] : eff.bound_uses)
          problem(pointer, kw, "numeric bound does not fit in 64 bits");
      }
    }

    if ((eff.types & kTString) && eff.min_len <= eff.max_len) {
      CNodeId id = new_node();
      CompiledNode& n = out.nodes[id];
      n.kind = CompiledNode::Kind::String;
      n.min_len = eff.min_len;
      n.max_len = eff.max_len;
      n.patterns = eff.patterns;
      n.formats = eff.formats;
      finished.insert(id);
      branches.push_back(id);
    }

    if (eff.types & kTArray) {
      CNodeId id = emit_array(eff);
      if (!is_finished_never(id)) branches.push_back(id);
    }
    if (eff.types & kTObject) {
      CNodeId id = emit_object(eff);
      if (!is_finished_never(id)) branches.push_back(id);
    }

    if (branches.empty()) {
      // stays Never
    } else if (branches.size() == 1 && out.nodes[branches.back()].kind != CompiledNode::Kind::Union) {
      out.nodes[slot] = out.nodes[branches.back()];
    } else {
      out.nodes[slot].kind = CompiledNode::Kind::Union;
      out.nodes[slot].branches = std::move(branches);
    }
  }

  CNodeId emit_array(const Eff& eff) {
    check_deadline();
    CNodeId id = new_node();
    uint32_t max_items = eff.max_items;
    size_t prefix_len = 0;
    for (const auto& side : eff.arr_sides) {
      prefix_len = std::max(prefix_len, side.prefix.size());
      if (side.tail == ArrSide::Tail::Forbidden)
        max_items = std::min<uint32_t>(max_items, static_cast<uint32_t>(side.prefix.size()));
    }
    prefix_len = std::min<size_t>(prefix_len, max_items);

    std::vector<CNodeId> prefix;
    for (size_t i = 0; i < prefix_len; ++i) {
      std::vector<NodeId> parts;
      for (const auto& side : eff.arr_sides) {
        if (i < side.prefix.size())
          parts.push_back(side.prefix[i]);
        else if (side.tail == ArrSide::Tail::Schema)
          parts.push_back(side.tail_schema);
      }
      if (parts.empty()) {
        prefix.push_back(out.any_root);
        continue;
      }
      CNodeId item = lower_conj(std::move(parts));
      if (is_finished_never(item)) {
        max_items = std::min<uint32_t>(max_items, static_cast<uint32_t>(i));
        break;
      }
      prefix.push_back(item);
    }

    std::optional<CNodeId> tail;
    bool tail_forbidden = false;
    if (max_items > prefix.size()) {
      std::vector<NodeId> parts;
      for (const auto& side : eff.arr_sides)
        if (side.tail == ArrSide::Tail::Schema) parts.push_back(side.tail_schema);
      if (!parts.empty()) {
        CNodeId t = lower_conj(std::move(parts));
        if (is_finished_never(t)) {
          tail_forbidden = true;
          max_items = std::min<uint32_t>(max_items, static_cast<uint32_t>(prefix.size()));
        } else {
          tail = t;
        }
      }
    }

    CompiledNode& n = out.nodes[id];
    if (eff.min_items > max_items) {
      finished.insert(id);
      return id;  // Never
    }
    n.kind = CompiledNode::Kind::Array;
    n.prefix_items = std::move(prefix);
    n.tail_item = tail;
    n.tail_forbidden = tail_forbidden;
    n.min_items = eff.min_items;
    n.max_items = max_items;
    finished.insert(id);
    return id;
  }

  CNodeId emit_object(const Eff& eff) {
    check_deadline();
    CNodeId id = new_node();

    std::vector<std::string> candidates;
    for (const auto& side : eff.obj_sides)
      for (const auto& [name, child] : side.props) candidates.push_back(name);
    for (const auto& r : eff.required) candidates.push_back(r);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    bool never = false;
    std::vector<CompiledNode::Property> props;
    for (const std::string& key : candidates) {
      std::vector<NodeId> parts;
      bool forbidden = false;
      for (const auto& side : eff.obj_sides) {
        const NodeId* own = nullptr;
        for (const auto& [name, child] : side.props)
          if (name == key) own = &child;
        if (own) {
          parts.push_back(*own);
        } else if (side.add == ObjSide::Add::Forbidden) {
          forbidden = true;
        } else if (side.add == ObjSide::Add::Schema) {
          parts.push_back(side.add_schema);
        }
      }
      bool required = eff.required.count(key) > 0;
      CompiledNode::Property prop;
      prop.name = key;
      prop.required = required;
      if (forbidden) {
        if (required) {
          never = true;
          break;
        }
        prop.schema = never_id;
      } else if (parts.empty()) {
        prop.schema = out.any_root;
      } else {
        prop.schema = lower_conj(std::move(parts));
        if (required && is_finished_never(prop.schema)) {
          never = true;
          break;
        }
      }
      props.push_back(std::move(prop));
    }

    bool any_forbidden = false;
    std::vector<NodeId> add_parts;
    bool has_add_schema = false;
    for (const auto& side : eff.obj_sides) {
      if (side.add == ObjSide::Add::Forbidden) any_forbidden = true;
      if (side.add == ObjSide::Add::Schema) {
        add_parts.push_back(side.add_schema);
        has_add_schema = true;
      }
    }

    CompiledNode::Additional add_mode = CompiledNode::Additional::Any;
    CNodeId add_schema = 0;
    if (any_forbidden) {
      add_mode = CompiledNode::Additional::Forbidden;
    } else if (has_add_schema) {
      CNodeId a = lower_conj(std::move(add_parts));
      if (is_finished_never(a)) {
        add_mode = CompiledNode::Additional::Forbidden;
      } else {
        add_mode = CompiledNode::Additional::Schema;
        add_schema = a;
      }
    }

    if (static_cast<uint32_t>(eff.required.size()) > eff.max_props) never = true;
    if (add_mode == CompiledNode::Additional::Forbidden) {
      uint32_t viable = 0;
      for (const auto& p : props)
        if (!is_finished_never(p.schema)) ++viable;
      if (eff.min_props > viable) never = true;
    }

    CompiledNode& n = out.nodes[id];
    if (never) {
      finished.insert(id);
      return id;  // Never
    }
    n.kind = CompiledNode::Kind::Object;
    n.properties = std::move(props);
    n.additional = add_mode;
    n.additional_schema = add_schema;
    n.min_properties = eff.min_props;
    n.max_properties = eff.max_props;
    build_key_trie(n);
    finished.insert(id);
    return id;
  }

  void build_any() {
    CNodeId u = new_node();  // any_root
    out.any_root = u;
    CNodeId lit_null = literal_node("null");
    CNodeId lit_true = literal_node("true");
    CNodeId lit_false = literal_node("false");
    CNodeId num = new_node();
    out.nodes[num].kind = CompiledNode::Kind::Number;
    CNodeId str = new_node();
    out.nodes[str].kind = CompiledNode::Kind::String;
    CNodeId arr = new_node();
    out.nodes[arr].kind = CompiledNode::Kind::Array;
    CNodeId obj = new_node();
    out.nodes[obj].kind = CompiledNode::Kind::Object;
    out.nodes[obj].key_trie.emplace_back();
    out.nodes[u].kind = CompiledNode::Kind::Union;
    out.nodes[u].branches = {lit_null, lit_true, lit_false, num, str, arr, obj};
    for (CNodeId id : {u, num, str, arr, obj}) finished.insert(id);
  }

  void run() {
    never_id = new_node();  // node 0: shared Never
    finished.insert(never_id);
    build_any();
    out.root = lower_conj({ir.root});
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Public API
// ---------------------------------------------------------------------------

CompileOutcome compile(const SchemaIR& ir, const KeywordManifest& manifest,
                       const CompileOptions& opts) {
  auto start = std::chrono::steady_clock::now();
  CompileOutcome outcome;
  auto automaton = std::make_shared<ConstraintAutomaton>();
  automaton->compiled_from = ir.source_id;
  automaton->default_max_depth = opts.max_depth;

  Lowering lowering{ir, manifest, *automaton, opts,
                    start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                std::chrono::duration<double>(opts.compile_timeout_seconds))};
  try {
    lowering.run();
  } catch (const CompileTimeout&) {
    outcome.status = CompileOutcome::Status::TimedOut;
    outcome.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return outcome;
  }

  outcome.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!lowering.problems.empty()) {
    outcome.status = CompileOutcome::Status::Rejected;
    outcome.rejected = std::move(lowering.problems);
    return outcome;
  }
  automaton->compile_seconds = outcome.seconds;
  outcome.status = CompileOutcome::Status::Ok;
  outcome.automaton = std::move(automaton);
  return outcome;
}

DeclaredCoverage declared_covered(const SchemaIR& ir, const KeywordManifest& manifest) {
  CompileOptions opts;
  opts.compile_timeout_seconds = 300.0;
  CompileOutcome outcome = compile(ir, manifest, opts);
  DeclaredCoverage cov;
  switch (outcome.status) {
    case CompileOutcome::Status::Ok: cov.covered = true; break;
    case CompileOutcome::Status::Rejected:
      cov.covered = false;
      cov.unsupported = outcome.rejected;
      break;
    case CompileOutcome::Status::TimedOut:
      cov.covered = false;
      cov.unsupported = {UnsupportedUse{"", "(compile)", "compilation resource limit exceeded"}};
      break;
  }
  return cov;
}

// ---------------------------------------------------------------------------
// Unsatisfiability (best-effort, syntactic)
// ---------------------------------------------------------------------------

namespace {

struct UnsatProbe {
  const SchemaIR& ir;

  struct Gathered {
    bool never = false;
    uint32_t types = kAllTypes;
    std::optional<Decimal> min_d, max_d, exmin_d, exmax_d;
    std::optional<int64_t> min_len, max_len, min_items, max_items, min_props, max_props;
    std::set<std::string> required;
    std::vector<const JsonValue*> consts;
    std::vector<const JsonValue*> enums;
  };

  void gather(Gathered& g, NodeId id, std::set<NodeId>& visited) {
    if (!visited.insert(id).second) return;
    const SchemaNode& n = ir.nodes[id];
    if (n.kind == SchemaNode::Kind::BooleanFalse) {
      g.never = true;
      return;
    }
    if (n.kind != SchemaNode::Kind::Object) return;
    if (const JsonValue* t = n.keyword("type")) {
      uint32_t bits = 0;
      if (t->is_string())
        bits = type_name_bits(t->as_string());
      else if (t->is_array()) {
        for (const auto& alt : t->as_array())
          if (alt.is_string()) bits |= type_name_bits(alt.as_string());
      } else {
        bits = kAllTypes;
      }
      g.types &= bits;
    }
    auto fold_int = [&](std::optional<int64_t>& slot, const char* kw, bool take_max) {
      const JsonValue* v = n.keyword(kw);
      if (!v || !v->is_number()) return;
      auto i = v->as_number().to_int64();
      if (!i) return;
      if (!slot)
        slot = *i;
      else
        slot = take_max ? std::max(*slot, *i) : std::min(*slot, *i);
    };
    fold_int(g.min_len, "minLength", true);
    fold_int(g.max_len, "maxLength", false);
    fold_int(g.min_items, "minItems", true);
    fold_int(g.max_items, "maxItems", false);
    fold_int(g.min_props, "minProperties", true);
    fold_int(g.max_props, "maxProperties", false);
    auto fold_dec = [&](std::optional<Decimal>& slot, const char* kw, bool take_max) {
      const JsonValue* v = n.keyword(kw);
      if (!v || !v->is_number()) return;
      if (!slot || (take_max ? slot->compare(v->as_number()) < 0
                             : slot->compare(v->as_number()) > 0))
        slot = v->as_number();
    };
    fold_dec(g.min_d, "minimum", true);
    fold_dec(g.exmin_d, "exclusiveMinimum", true);
    fold_dec(g.max_d, "maximum", false);
    fold_dec(g.exmax_d, "exclusiveMaximum", false);
    if (const JsonValue* req = n.keyword("required"); req && req->is_array()) {
      for (const auto& r : req->as_array())
        if (r.is_string()) g.required.insert(r.as_string());
    }
    if (const JsonValue* c = n.keyword("const")) g.consts.push_back(c);
    if (const JsonValue* e = n.keyword("enum"); e && e->is_array()) g.enums.push_back(e);
    if (const auto* all = n.child_list("allOf"))
      for (NodeId child : *all) gather(g, child, visited);
    if (n.ref) gather(g, *n.ref, visited);
  }

  bool run() {
    Gathered g;
    std::set<NodeId> visited;
    gather(g, ir.root, visited);
    if (g.never) return true;
    if (g.types == 0) return true;
    if (g.min_len && g.max_len && *g.min_len > *g.max_len) return true;
    if (g.min_items && g.max_items && *g.min_items > *g.max_items) return true;
    if (g.min_props && g.max_props && *g.min_props > *g.max_props) return true;
    if (g.max_props && static_cast<int64_t>(g.required.size()) > *g.max_props) return true;
    // numeric emptiness: effective interval collapses
    auto lower = g.min_d;
    if (g.exmin_d && (!lower || lower->compare(*g.exmin_d) < 0)) lower = g.exmin_d;
    auto upper = g.max_d;
    if (g.exmax_d && (!upper || upper->compare(*g.exmax_d) > 0)) upper = g.exmax_d;
    bool numeric_only = (g.types & ~(kTInteger | kTFraction)) == 0;
    if (numeric_only && lower && upper) {
      int c = lower->compare(*upper);
      bool exclusive = g.exmin_d || g.exmax_d;
      if (c > 0 || (c == 0 && exclusive)) return true;
      // integer-only: an open interval with no integer inside
      if (!(g.types & kTFraction)) {
        try {
          int64_t lo = g.min_d ? decimal_ceil(*g.min_d) : INT64_MIN;
          if (g.exmin_d) lo = std::max(lo, decimal_floor(*g.exmin_d) + 1);
          int64_t hi = g.max_d ? decimal_floor(*g.max_d) : INT64_MAX;
          if (g.exmax_d) hi = std::min(hi, decimal_ceil(*g.exmax_d) - 1);
          if (lo > hi) return true;
        } catch (const BoundOverflow&) {
        }
      }
    }
    // const/enum: every candidate fails the rest of the schema
    auto candidates_fail = [&](const std::vector<const JsonValue*>& values) {
      try {
        Validator v(ir);
        for (const JsonValue* cand : values)
          if (v.validate(*cand).valid) return false;
        return true;
      } catch (const SchemaError&) {
        return false;  // unknown
      }
    };
    for (const JsonValue* c : g.consts) {
      std::vector<const JsonValue*> one = {c};
      if (candidates_fail(one)) return true;
    }
    for (const JsonValue* e : g.enums) {
      std::vector<const JsonValue*> values;
      for (const auto& v : e->as_array()) values.push_back(&v);
      if (candidates_fail(values)) return true;
    }
    return false;
  }
};

}  // namespace

bool detect_unsatisfiable(const SchemaIR& ir) {
  UnsatProbe probe{ir};
  return probe.run();
}

}  // namespace tokengate
