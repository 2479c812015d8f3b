#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "tokengate/json_value.hpp"

using namespace tokengate;

TEST_CASE("decimal parses and normalizes lexemes") {
  CHECK(Decimal::from_lexeme("0").to_string() == "0");
  CHECK(Decimal::from_lexeme("1.0").to_string() == "1");
  CHECK(Decimal::from_lexeme("1.50").to_string() == "1.5");
  CHECK(Decimal::from_lexeme("-0.0").to_string() == "-0");
  CHECK(Decimal::from_lexeme("1e2").to_string() == "100");
  CHECK(Decimal::from_lexeme("1.2e-3").to_string() == "0.0012");
  CHECK(Decimal::from_lexeme("123e300").to_string() == "1.23e302");
  CHECK(Decimal::from_lexeme("0.00000001").to_string() == "1e-8");
}

TEST_CASE("decimal comparison is numeric") {
  auto d = [](const char* s) { return Decimal::from_lexeme(s); };
  CHECK(d("1") == d("1.0"));
  CHECK(d("1") == d("1e0"));
  CHECK(d("-0") == d("0"));
  CHECK(d("1.5") < d("2"));
  CHECK(d("-3") < d("-2.5"));
  CHECK(d("9.99") < d("10"));
  CHECK(d("100") < d("1e3"));
  CHECK_FALSE(d("0.1") < d("0.1"));
  CHECK(d("0.3") < d("0.30000001"));
}

TEST_CASE("decimal comparison agrees with long double on random pairs") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int64_t> mant(-100000, 100000);
  std::uniform_int_distribution<int> exp(-6, 6);
  for (int i = 0; i < 2000; ++i) {
    int64_t ma = mant(rng), mb = mant(rng);
    int ea = exp(rng), eb = exp(rng);
    Decimal a = Decimal::from_lexeme(std::to_string(ma) + "e" + std::to_string(ea));
    Decimal b = Decimal::from_lexeme(std::to_string(mb) + "e" + std::to_string(eb));
    long double fa = static_cast<long double>(ma) * powl(10.0L, ea);
    long double fb = static_cast<long double>(mb) * powl(10.0L, eb);
    int expected = fa < fb ? -1 : fa > fb ? 1 : 0;
    CAPTURE(ma);
    CAPTURE(ea);
    CAPTURE(mb);
    CAPTURE(eb);
    CHECK(a.compare(b) == expected);
  }
}

TEST_CASE("decimal multiple-of is exact") {
  auto d = [](const char* s) { return Decimal::from_lexeme(s); };
  CHECK(d("10").is_multiple_of(d("5")));
  CHECK(d("0.0075").is_multiple_of(d("0.0001")));
  CHECK(d("4.5").is_multiple_of(d("1.5")));
  CHECK_FALSE(d("4.6").is_multiple_of(d("1.5")));
  CHECK(d("-9").is_multiple_of(d("3")));
  CHECK(d("0").is_multiple_of(d("7")));
  CHECK_FALSE(d("1").is_multiple_of(d("0")));
  CHECK_FALSE(d("0.00751").is_multiple_of(d("0.0001")));
  CHECK(d("1e20").is_multiple_of(d("2")));
  CHECK_FALSE(d("1e20").is_multiple_of(d("3")));
  // 10^k mod 7 cycles; 10^21 mod 7 = 10^(21 mod 6) mod 7 = 10^3 mod 7 = 6
  CHECK_FALSE(d("1e21").is_multiple_of(d("7")));
}

TEST_CASE("json parse handles the basic shapes") {
  JsonValue v = JsonValue::parse(R"({"a": 1, "b": [true, null, "x"], "c": {"d": 1.5}})");
  REQUIRE(v.is_object());
  CHECK(v.find("a")->as_number() == Decimal::from_int(1));
  CHECK(v.find("b")->as_array().size() == 3);
  CHECK(v.find("b")->as_array()[0].as_boolean());
  CHECK(v.find("b")->as_array()[1].is_null());
  CHECK(v.find("c")->find("d")->as_number() == Decimal::from_lexeme("1.5"));
}

TEST_CASE("json parse reports byte offsets for malformed input") {
  CHECK_THROWS_AS(JsonValue::parse("{"), JsonParseError);
  CHECK_THROWS_AS(JsonValue::parse("[1,]"), JsonParseError);
  CHECK_THROWS_AS(JsonValue::parse("01"), JsonParseError);
  CHECK_THROWS_AS(JsonValue::parse("\"ab"), JsonParseError);
  CHECK_THROWS_AS(JsonValue::parse("{\"a\":1,\"a\":2}"), JsonParseError);
  CHECK_THROWS_AS(JsonValue::parse("true false"), JsonParseError);
  try {
    JsonValue::parse("[1, x]");
  } catch (const JsonParseError& e) {
    CHECK(e.offset() == 4);
  }
}

TEST_CASE("string escapes decode like the spec says") {
  CHECK(JsonValue::parse(R"("a\nb")").as_string() == "a\nb");
  CHECK(JsonValue::parse(R"("A")").as_string() == "A");
  CHECK(JsonValue::parse(R"("é")").as_string() == "\xc3\xa9");
  // astral plane via surrogate pair
  CHECK(JsonValue::parse(R"("😀")").as_string() == "\xF0\x9F\x98\x80");
  // lone surrogates become U+FFFD
  CHECK(JsonValue::parse(R"("\ud800")").as_string() == "\xEF\xBF\xBD");
  CHECK(JsonValue::parse(R"("\udc00x")").as_string() == "\xEF\xBF\xBDx");
}

TEST_CASE("serialize then parse is the identity on random documents") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick(0, 5);
  std::function<JsonValue(int)> gen = [&](int depth) -> JsonValue {
    int k = depth > 2 ? pick(rng) % 4 : pick(rng);
    switch (k) {
      case 0: return JsonValue::null();
      case 1: return JsonValue::boolean(rng() & 1);
      case 2: {
        int64_t m = static_cast<int64_t>(rng() % 20001) - 10000;
        int e = static_cast<int>(rng() % 7) - 3;
        return JsonValue::number(Decimal::from_lexeme(std::to_string(m) + "e" + std::to_string(e)));
      }
      case 3: {
        std::string s;
        size_t len = rng() % 8;
        for (size_t i = 0; i < len; ++i) s += static_cast<char>('a' + rng() % 26);
        if (rng() % 4 == 0) s += "\n\"\\\xc3\xa9";
        return JsonValue::string(s);
      }
      case 4: {
        JsonValue arr = JsonValue::array();
        size_t n = rng() % 4;
        for (size_t i = 0; i < n; ++i) arr.push_back(gen(depth + 1));
        return arr;
      }
      default: {
        JsonValue obj = JsonValue::object();
        size_t n = rng() % 4;
        for (size_t i = 0; i < n; ++i)
          obj.set("k" + std::to_string(i) + std::string(1, static_cast<char>('a' + rng() % 26)),
                  gen(depth + 1));
        return obj;
      }
    }
  };
  for (int i = 0; i < 500; ++i) {
    JsonValue v = gen(0);
    std::string text = v.serialize();
    JsonValue again = JsonValue::parse(text);
    CHECK(again == v);
    // serialization is canonical: a second round trip is byte-identical
    CHECK(again.serialize() == text);
  }
}

TEST_CASE("object equality ignores key order, arrays do not") {
  JsonValue a = JsonValue::parse(R"({"x":1,"y":2})");
  JsonValue b = JsonValue::parse(R"({"y":2,"x":1})");
  CHECK(a == b);
  CHECK(a.structural_hash() == b.structural_hash());
  CHECK(JsonValue::parse("[1,2]") != JsonValue::parse("[2,1]"));
  CHECK(JsonValue::parse(R"({"x":1})") != JsonValue::parse(R"({"x":"1"})"));
  CHECK(JsonValue::parse(R"({"x":1.0})") == JsonValue::parse(R"({"x":1})"));
}

TEST_CASE("serialization preserves key order") {
  JsonValue v = JsonValue::parse(R"({"zeta":1,"alpha":2})");
  CHECK(v.serialize() == R"({"zeta":1,"alpha":2})");
}
