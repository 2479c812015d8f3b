#include <doctest.h>

#include "tokengate/schema.hpp"

using namespace tokengate;

TEST_CASE("parse_schema accepts objects and booleans, rejects the rest") {
  CHECK(parse_schema("{}").raw.is_object());
  CHECK(parse_schema("true").raw.is_boolean());
  CHECK(parse_schema("false").raw.is_boolean());
  CHECK_THROWS_AS(parse_schema("[1,2]"), SchemaError);
  CHECK_THROWS_AS(parse_schema("42"), SchemaError);
  CHECK_THROWS_AS(parse_schema("\"s\""), SchemaError);
  CHECK_THROWS_AS(parse_schema("{,}"), SchemaError);
  try {
    parse_schema("[1,2]");
  } catch (const SchemaError& e) {
    CHECK(e.code() == SchemaError::Code::NotASchema);
  }
}

TEST_CASE("declared draft is read from $schema") {
  auto doc = parse_schema(R"({"$schema":"http://json-schema.org/draft-04/schema#","type":"string"})");
  CHECK(doc.declared_draft == SchemaDraft::Draft04);
  CHECK(parse_schema(R"({"$schema":"https://json-schema.org/draft/2020-12/schema"})").declared_draft ==
        SchemaDraft::Draft2020_12);
  CHECK(parse_schema("{}").declared_draft == SchemaDraft::Unknown);
  // missing draft defaults to 2020-12 after normalization
  CHECK(normalize(parse_schema("{}")).draft == SchemaDraft::Draft2020_12);
}

TEST_CASE("normalize resolves internal refs") {
  auto ir = normalize(parse_schema(R"({"$ref":"#/$defs/a","$defs":{"a":{"type":"null"}}})"));
  const SchemaNode& root = ir.node(ir.root);
  REQUIRE(root.ref.has_value());
  const SchemaNode& target = ir.node(*root.ref);
  REQUIRE(target.keyword("type"));
  CHECK(target.keyword("type")->as_string() == "null");
  CHECK(ir.cycle_pointers.empty());
}

TEST_CASE("normalize rejects external refs") {
  CHECK_THROWS_AS(normalize(parse_schema(R"({"$ref":"http://remote/x.json"})")), SchemaError);
  CHECK_THROWS_AS(normalize(parse_schema(R"({"$ref":"other.json#/a"})")), SchemaError);
  try {
    normalize(parse_schema(R"({"$ref":"http://remote/x.json"})"));
  } catch (const SchemaError& e) {
    CHECK(e.code() == SchemaError::Code::UnresolvedExternalRef);
  }
}

TEST_CASE("normalize records reference cycles") {
  // self-referential list schema; oracle: the reference graph has exactly the
  // edge chain root -> n -> anyOf/1 -> n, so n and anyOf/1 form the cycle
  auto ir = normalize(parse_schema(
      R"({"$defs":{"n":{"anyOf":[{"type":"null"},{"$ref":"#/$defs/n"}]}},"$ref":"#/$defs/n"})"));
  CHECK(ir.cycle_pointers.count("/$defs/n") == 1);
  CHECK(ir.cycle_pointers.count("/$defs/n/anyOf/1") == 1);
  CHECK(ir.cycle_pointers.count("") == 0);  // the root only points in
}

TEST_CASE("pure ref cycles are an error") {
  CHECK_THROWS_AS(
      normalize(parse_schema(
          R"({"$defs":{"a":{"$ref":"#/$defs/b"},"b":{"$ref":"#/$defs/a"}},"$ref":"#/$defs/a"})")),
      SchemaError);
  try {
    normalize(parse_schema(R"({"$ref":"#"})"));
  } catch (const SchemaError& e) {
    CHECK(e.code() == SchemaError::Code::RefCycleTooDeep);
  }
}

TEST_CASE("anchors resolve") {
  auto ir = normalize(
      parse_schema(R"({"$ref":"#foo","$defs":{"A":{"$anchor":"foo","type":"integer"}}})"));
  REQUIRE(ir.node(ir.root).ref.has_value());
  CHECK(ir.node(*ir.node(ir.root).ref).keyword("type")->as_string() == "integer");
}

TEST_CASE("json pointers with escapes and uri encoding") {
  JsonValue doc = JsonValue::parse(R"({"a/b":{"c~d":1},"arr":[10,20]})");
  REQUIRE(resolve_json_pointer(doc, "/a~1b/c~0d"));
  CHECK(resolve_json_pointer(doc, "/a~1b/c~0d")->as_number() == Decimal::from_int(1));
  CHECK(resolve_json_pointer(doc, "/arr/1")->as_number() == Decimal::from_int(20));
  CHECK(resolve_json_pointer(doc, "/arr/01") == nullptr);
  CHECK(resolve_json_pointer(doc, "/missing") == nullptr);
  CHECK(resolve_json_pointer(doc, "") == &doc);
  // percent-encoding decodes before token splitting: %7E0 becomes ~0
  CHECK(resolve_json_pointer(doc, "/a~1b/c%7E0d") != nullptr);
  // %2F decodes to a real separator, so it cannot address a key with a slash
  CHECK(resolve_json_pointer(doc, "/a%2Fb/c~0d") == nullptr);
}

TEST_CASE("count_fields counts every object key") {
  // oracle: recursive key counting by hand
  CHECK(count_fields(parse_schema("{}")) == 0);
  // keys: type, properties, a, type
  CHECK(count_fields(parse_schema(R"({"type":"object","properties":{"a":{"type":"integer"}}})")) ==
        4);
  // keys inside enum literals count too
  CHECK(count_fields(parse_schema(R"({"enum":[{"a":1},{"b":{"c":2}}]})")) == 4);
  CHECK(count_fields(parse_schema("true")) == 0);
}

TEST_CASE("draft-04 shims rewrite old forms") {
  // tuple items become prefixItems with additionalItems as the tail
  auto ir = normalize(parse_schema(
      R"({"items":[{"type":"string"}],"additionalItems":{"type":"integer"}})"));
  const SchemaNode& root = ir.node(ir.root);
  REQUIRE(root.child_list("prefixItems"));
  CHECK(root.child_list("prefixItems")->size() == 1);
  REQUIRE(root.child("items").has_value());
  CHECK(ir.node(*root.child("items")).keyword("type")->as_string() == "integer");

  // boolean exclusiveMinimum folds onto the paired bound
  auto ir2 = normalize(parse_schema(R"({"minimum":3,"exclusiveMinimum":true})"));
  const SchemaNode& root2 = ir2.node(ir2.root);
  CHECK(root2.keyword("minimum") == nullptr);
  REQUIRE(root2.keyword("exclusiveMinimum"));
  CHECK(root2.keyword("exclusiveMinimum")->as_number() == Decimal::from_int(3));

  // dependencies splits by value shape
  auto ir3 = normalize(parse_schema(
      R"({"dependencies":{"a":["b"],"c":{"required":["d"]}}})"));
  const SchemaNode& root3 = ir3.node(ir3.root);
  CHECK(root3.keyword("dependentRequired") != nullptr);
  CHECK(root3.child_map("dependentSchemas") != nullptr);
}

TEST_CASE("unknown keywords are preserved and flagged") {
  auto ir = normalize(parse_schema(R"({"x-vendor":1,"type":"string"})"));
  REQUIRE(ir.node(ir.root).unknown_keywords.size() == 1);
  CHECK(ir.node(ir.root).unknown_keywords[0] == "x-vendor");
  CHECK(ir.node(ir.root).keyword("x-vendor") != nullptr);
}

TEST_CASE("utf8_length counts code points") {
  CHECK(utf8_length("") == 0);
  CHECK(utf8_length("abc") == 3);
  CHECK(utf8_length("\xc3\xa9") == 1);
  CHECK(utf8_length("\xF0\x9F\x98\x80") == 1);
  CHECK(utf8_length("a\xc3\xa9" "b") == 3);
}
