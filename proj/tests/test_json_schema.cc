/*!
 *  Copyright (c) 2026 by Contributors
 * \file test_json_schema.cc
 */
#include <gtest/gtest.h>

#include "gmask/error.h"
#include "gmask/json_schema.h"
#include "gmask/pda.h"

namespace gmask {
namespace {

class SchemaLanguage {
 public:
  explicit SchemaLanguage(const std::string& schema, bool strict = false)
      : pda_(BuildPda(NormalizeGrammar(SchemaToGrammar(schema, Options(strict))))), oracle_(pda_) {}
  bool Accepts(const std::string& text) const { return oracle_.Accepts(text); }

 private:
  static SchemaOptions Options(bool strict) {
    SchemaOptions o;
    o.strict_whitespace = strict;
    return o;
  }
  Pda pda_;
  PdaOracle oracle_;
};

TEST(JsonSchema, Boolean) {
  SchemaLanguage s(R"({"type": "boolean"})");
  EXPECT_TRUE(s.Accepts("true"));
  EXPECT_TRUE(s.Accepts("false"));
  EXPECT_TRUE(s.Accepts(" true\n"));
  EXPECT_FALSE(s.Accepts("tru"));
  EXPECT_FALSE(s.Accepts("null"));
}

TEST(JsonSchema, RequiredIntegerProperty) {
  SchemaLanguage s(R"({"type": "object", "properties": {"a": {"type": "integer"}},
                       "required": ["a"], "additionalProperties": false})");
  EXPECT_TRUE(s.Accepts("{\"a\": -3}"));
  EXPECT_TRUE(s.Accepts("{\"a\":0}"));
  EXPECT_FALSE(s.Accepts("{\"a\": 1.5}"));
  EXPECT_FALSE(s.Accepts("{\"a\": 1.0}"));
  EXPECT_FALSE(s.Accepts("{\"a\": 01}"));
  EXPECT_FALSE(s.Accepts("{}"));
  EXPECT_FALSE(s.Accepts("{\"a\": 1, \"b\": 2}"));
}

TEST(JsonSchema, EnumOfStrings) {
  SchemaLanguage s(R"({"enum": ["x", "y"]})");
  EXPECT_TRUE(s.Accepts("\"x\""));
  EXPECT_TRUE(s.Accepts("\"y\""));
  EXPECT_FALSE(s.Accepts("\"z\""));
  EXPECT_FALSE(s.Accepts("\"xy\""));
}

TEST(JsonSchema, OptionalPropertiesKeepOrder) {
  SchemaLanguage s(R"({"type": "object",
                       "properties": {"a": {"type": "null"}, "b": {"type": "string"},
                                      "c": {"type": "number"}},
                       "required": ["b"], "additionalProperties": false})",
                   true);
  EXPECT_TRUE(s.Accepts(R"({"b":"q"})"));
  EXPECT_TRUE(s.Accepts(R"({"a":null,"b":"q"})"));
  EXPECT_TRUE(s.Accepts(R"({"b":"q","c":-1.5e3})"));
  EXPECT_TRUE(s.Accepts(R"({"a":null,"b":"","c":0})"));
  EXPECT_FALSE(s.Accepts(R"({"b":"q","a":null})"));
  EXPECT_FALSE(s.Accepts(R"({"a":null})"));
  EXPECT_FALSE(s.Accepts(R"({"b": "q"})"));
  EXPECT_FALSE(s.Accepts(R"({,"b":"q"})"));
}

TEST(JsonSchema, AllOptionalAllowsEmptyObject) {
  SchemaLanguage s(R"({"type": "object", "properties": {"a": {"type": "integer"},
                       "b": {"type": "integer"}}, "additionalProperties": false})");
  EXPECT_TRUE(s.Accepts("{}"));
  EXPECT_TRUE(s.Accepts("{ }"));
  EXPECT_TRUE(s.Accepts("{\"b\": 2}"));
  EXPECT_TRUE(s.Accepts("{\"a\": 1, \"b\": 2}"));
  EXPECT_FALSE(s.Accepts("{\"a\": 1,}"));
}

TEST(JsonSchema, ArrayBounds) {
  SchemaLanguage s(R"({"type": "array", "items": {"type": "integer"}, "minItems": 1,
                       "maxItems": 3})");
  EXPECT_FALSE(s.Accepts("[]"));
  EXPECT_TRUE(s.Accepts("[1]"));
  EXPECT_TRUE(s.Accepts("[1, 2, 3]"));
  EXPECT_FALSE(s.Accepts("[1, 2, 3, 4]"));
  EXPECT_FALSE(s.Accepts("[1,]"));
  SchemaLanguage open(R"({"type": "array", "items": {"type": "string"}})");
  EXPECT_TRUE(open.Accepts("[]"));
  EXPECT_TRUE(open.Accepts("[\"a\", \"b\", \"c\", \"d\", \"e\"]"));
}

TEST(JsonSchema, ConstAndTypeUnion) {
  SchemaLanguage c(R"({"const": {"k": [1, "two", null]}})");
  EXPECT_TRUE(c.Accepts(R"({"k":[1,"two",null]})"));
  EXPECT_TRUE(c.Accepts(R"({ "k" : [ 1 , "two" , null ] })"));
  EXPECT_FALSE(c.Accepts(R"({"k":[1,"two"]})"));
  SchemaLanguage u(R"({"type": ["integer", "null"]})");
  EXPECT_TRUE(u.Accepts("null"));
  EXPECT_TRUE(u.Accepts("12"));
  EXPECT_FALSE(u.Accepts("\"12\""));
}

TEST(JsonSchema, StringEscapesFollowEcma404) {
  SchemaLanguage s(R"({"type": "string"})");
  EXPECT_TRUE(s.Accepts(R"("a\"b\\cé\n")"));
  EXPECT_TRUE(s.Accepts("\"\xc3\xa9\""));
  EXPECT_FALSE(s.Accepts("\"a\nb\""));
  EXPECT_FALSE(s.Accepts(R"("\x41")"));
  EXPECT_FALSE(s.Accepts(R"("\u00e")"));
}

TEST(JsonSchema, ObjectWithoutPropertiesAcceptsAnyObject) {
  SchemaLanguage open(R"({"type": "object", "additionalProperties": true})");
  EXPECT_TRUE(open.Accepts(R"({"x": 1, "y": [true]})"));
  EXPECT_FALSE(open.Accepts("[]"));
  SchemaLanguage closed(R"({"type": "object", "additionalProperties": false})");
  EXPECT_TRUE(closed.Accepts("{ }"));
  EXPECT_FALSE(closed.Accepts(R"({"x": 1})"));
}

TEST(JsonSchema, EmptySchemaAcceptsAnyJson) {
  SchemaLanguage s("{}");
  EXPECT_TRUE(s.Accepts(R"({"x": [1, 2.5e-3, true, null, {"y": "z"}]})"));
  EXPECT_TRUE(s.Accepts("-0.5"));
  EXPECT_FALSE(s.Accepts("{x: 1}"));
}

TEST(JsonSchema, RejectsUnsupportedAndMalformedSchemas) {
  try {
    SchemaToGrammar(R"({"type": "string", "pattern": "a+", "format": "date"})");
    FAIL() << "expected a SchemaError";
  } catch (const SchemaError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("pattern"), std::string::npos) << msg;
    EXPECT_NE(msg.find("format"), std::string::npos) << msg;
  }
  EXPECT_THROW(SchemaToGrammar(R"({"anyOf": [{"type": "string"}]})"), SchemaError);
  EXPECT_THROW(SchemaToGrammar(R"({"type": "object", "properties": {"a": {}}})"), SchemaError);
  EXPECT_THROW(SchemaToGrammar(R"({"type": "object", "properties": {"a": {}},
                                   "additionalProperties": true})"),
               SchemaError);
  EXPECT_THROW(SchemaToGrammar(R"({"type": "object", "additionalProperties": {}})"), SchemaError);
  EXPECT_THROW(SchemaToGrammar(R"({"type": "object", "properties": {"a": {}},
                                   "required": ["b"], "additionalProperties": false})"),
               SchemaError);
  EXPECT_THROW(SchemaToGrammar(R"({"type": "decimal"})"), SchemaError);
  EXPECT_THROW(SchemaToGrammar(R"({"type": "array", "minItems": 3, "maxItems": 2})"),
               SchemaError);
  EXPECT_THROW(SchemaToGrammar("{\"type\": "), SchemaError);
  EXPECT_THROW(SchemaToGrammar(R"({"enum": []})"), SchemaError);
}

TEST(JsonSchema, OutputIsDeterministic) {
  std::string schema = R"({"type": "object", "properties": {"z": {"type": "string"},
                           "a": {"type": "array", "items": {"type": "boolean"}}},
                           "required": ["z"], "additionalProperties": false})";
  EXPECT_EQ(SchemaToGrammarText(schema), SchemaToGrammarText(schema));
  EXPECT_NO_THROW(ParseGrammar(SchemaToGrammarText(schema)));
}

}  // namespace
}  // namespace gmask
