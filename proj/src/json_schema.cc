/*!
 *  Copyright (c) 2026 by Contributors
 * \file json_schema.cc
 * \brief JSON Schema subset to grammar text.
 */
#include "gmask/json_schema.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <json.hpp>

#include "gmask/error.h"

namespace gmask {

namespace {

using Json = nlohmann::ordered_json;

const std::set<std::string>& SupportedKeywords() {
  static const std::set<std::string> kKeywords = {
      "type",     "properties", "required", "additionalProperties", "items",       "enum",
      "const",    "minItems",   "maxItems", "title",                "description", "$schema",
      "$id",      "$comment"};
  return kKeywords;
}

// Quote raw bytes as a grammar string literal.
std::string GrammarLiteral(std::string_view bytes) {
  std::string out = "\"";
  for (char c : bytes) {
    uint8_t b = static_cast<uint8_t>(c);
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (b >= 0x20 && b < 0x7F) {
      out += c;
    } else {
      char buf[8];
      std::snprintf(buf, sizeof(buf), "\\x%02X", b);
      out += buf;
    }
  }
  return out + "\"";
}

std::string SanitizeName(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "field" : out;
}

void CollectUnsupported(const Json& schema, const std::string& path,
                        std::vector<std::string>* out) {
  if (!schema.is_object()) {
    throw SchemaError("schema at " + path + " must be a JSON object");
  }
  for (auto it = schema.begin(); it != schema.end(); ++it) {
    if (!SupportedKeywords().count(it.key())) out->push_back(path + "/" + it.key());
  }
  if (schema.contains("properties") && schema["properties"].is_object()) {
    for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it) {
      CollectUnsupported(it.value(), path + "/properties/" + it.key(), out);
    }
  }
  if (schema.contains("items")) CollectUnsupported(schema["items"], path + "/items", out);
}

class SchemaConverter {
 public:
  explicit SchemaConverter(const SchemaOptions& options) : options_(options) {}

  std::string Convert(const Json& schema) {
    std::string body = Visit(schema, "value");
    std::string root = options_.strict_whitespace ? body : Require("ws") + " " + body + " ws";
    std::string out = "root ::= " + root + "\n";
    for (const auto& [name, rule] : rules_) out += name + " ::= " + rule + "\n";
    return out;
  }

 private:
  // Separator between JSON tokens.
  std::string Sep() {
    if (options_.strict_whitespace) return " ";
    Require("ws");
    return " ws ";
  }

  std::string AddRule(const std::string& hint, const std::string& body) {
    std::string name = hint;
    for (int i = 2; used_names_.count(name); ++i) name = hint + "_" + std::to_string(i);
    used_names_.insert(name);
    rules_.push_back({name, body});
    return name;
  }

  // Emits a shared helper rule once.
  std::string Require(const std::string& name) {
    if (helpers_.count(name)) return name;
    helpers_.insert(name);
    used_names_.insert(name);
    if (name == "ws") {
      rules_.push_back({"ws", R"([ \t\n\r]*)"});
    } else if (name == "string") {
      rules_.push_back({"string", R"("\"" string_char* "\"")"});
      Require("string_char");
    } else if (name == "string_char") {
      // Printable ASCII except '"' and '\\', any non-ASCII code point as UTF-8, or an escape.
      rules_.push_back({"string_char",
                        R"([\x20-\x21\x23-\x5B\x5D-\x7E] | [\u0080-\U0010FFFF] | "\\" (["\\/bfnrt] | "u" [0-9a-fA-F]{4}))"});
    } else if (name == "number") {
      rules_.push_back({"number", R"("-"? ("0" | [1-9] [0-9]*) ("." [0-9]+)? ([eE] [+\-]? [0-9]+)?)"});
    } else if (name == "integer") {
      rules_.push_back({"integer", R"("-"? ("0" | [1-9] [0-9]*))"});
    } else if (name == "boolean") {
      rules_.push_back({"boolean", R"("true" | "false")"});
    } else if (name == "null") {
      rules_.push_back({"null", R"("null")"});
    } else if (name == "any_value") {
      std::string s = Sep();
      rules_.push_back({"any_value", R"(any_object | any_array | string | number | "true" | "false" | "null")"});
      rules_.push_back({"any_object", "\"{\"" + s + "(string" + s + "\":\"" + s + "any_value" + s +
                                          "(\",\"" + s + "string" + s + "\":\"" + s + "any_value" +
                                          s + ")*)? \"}\""});
      rules_.push_back({"any_array", "\"[\"" + s + "(any_value" + s + "(\",\"" + s + "any_value" +
                                         s + ")*)? \"]\""});
      used_names_.insert("any_object");
      used_names_.insert("any_array");
      Require("string");
      Require("number");
    }
    return name;
  }

  /*! \brief Grammar for exactly the JSON value `v`, with the usual whitespace between tokens. */
  std::string ValueLiteral(const Json& v) {
    if (v.is_array()) {
      if (v.empty()) return "\"[\"" + Sep() + "\"]\"";
      std::string out = "\"[\"";
      for (size_t i = 0; i < v.size(); ++i) {
        out += (i == 0 ? "" : Sep() + "\",\"") + Sep() + ValueLiteral(v[i]);
      }
      return "(" + out + Sep() + "\"]\")";
    }
    if (v.is_object()) {
      if (v.empty()) return "\"{\"" + Sep() + "\"}\"";
      std::string out = "\"{\"";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        out += (first ? "" : Sep() + "\",\"") + Sep() + GrammarLiteral(Json(it.key()).dump()) +
               Sep() + "\":\"" + Sep() + ValueLiteral(it.value());
        first = false;
      }
      return "(" + out + Sep() + "\"}\")";
    }
    return GrammarLiteral(v.dump());
  }

  std::string Visit(const Json& schema, const std::string& hint) {
    if (schema.contains("const")) {
      return ValueLiteral(schema["const"]);
    }
    if (schema.contains("enum")) {
      const Json& values = schema["enum"];
      if (!values.is_array() || values.empty()) throw SchemaError("enum must be a non-empty array");
      std::string body;
      for (const auto& v : values) {
        if (!body.empty()) body += " | ";
        body += ValueLiteral(v);
      }
      return AddRule(hint, body);
    }
    std::vector<std::string> types;
    if (schema.contains("type")) {
      const Json& t = schema["type"];
      if (t.is_string()) {
        types.push_back(t.get<std::string>());
      } else if (t.is_array() && !t.empty()) {
        for (const auto& x : t) {
          if (!x.is_string()) throw SchemaError("type list entries must be strings");
          types.push_back(x.get<std::string>());
        }
      } else {
        throw SchemaError("type must be a string or a non-empty list of strings");
      }
    } else if (schema.contains("properties")) {
      types.push_back("object");
    } else if (schema.contains("items")) {
      types.push_back("array");
    } else {
      return Require("any_value");
    }
    std::vector<std::string> alts;
    for (const auto& type : types) alts.push_back(VisitType(schema, type, hint));
    if (alts.size() == 1) return alts[0];
    std::string body;
    for (const auto& a : alts) body += (body.empty() ? "" : " | ") + a;
    return AddRule(hint, body);
  }

  std::string VisitType(const Json& schema, const std::string& type, const std::string& hint) {
    if (type == "string") return Require("string");
    if (type == "number") return Require("number");
    if (type == "integer") return Require("integer");
    if (type == "boolean") return Require("boolean");
    if (type == "null") return Require("null");
    if (type == "object") return VisitObject(schema, hint);
    if (type == "array") return VisitArray(schema, hint);
    throw SchemaError("unknown type '" + type + "'");
  }

  std::string VisitObject(const Json& schema, const std::string& hint) {
    bool closed = false;
    if (schema.contains("additionalProperties")) {
      const Json& ap = schema["additionalProperties"];
      if (!ap.is_boolean()) {
        throw SchemaError("additionalProperties is only supported as a boolean",
                          {"additionalProperties"});
      }
      closed = !ap.get<bool>();
    }
    std::string s = Sep();
    if (!schema.contains("properties")) {
      if (closed) return AddRule(hint, "\"{\"" + s + "\"}\"");
      Require("any_value");
      return "any_object";
    }
    const Json& props = schema["properties"];
    if (!props.is_object()) throw SchemaError("properties must be an object");
    if (!closed) {
      throw SchemaError(
          "objects with properties must set additionalProperties to false (members are emitted "
          "in a fixed order)",
          {"additionalProperties"});
    }
    std::set<std::string> required;
    if (schema.contains("required")) {
      const Json& req = schema["required"];
      if (!req.is_array()) throw SchemaError("required must be an array");
      for (const auto& r : req) {
        if (!r.is_string()) throw SchemaError("required entries must be strings");
        if (!props.contains(r.get<std::string>())) {
          throw SchemaError("required property '" + r.get<std::string>() +
                            "' is not listed in properties");
        }
        required.insert(r.get<std::string>());
      }
    }

    std::string name = AddRule(hint, "");
    size_t self = rules_.size() - 1;
    std::vector<std::string> members;
    std::vector<bool> is_required;
    for (auto it = props.begin(); it != props.end(); ++it) {
      std::string value = Visit(it.value(), name + "_" + SanitizeName(it.key()));
      members.push_back(GrammarLiteral(Json(it.key()).dump()) + s + "\":\"" + s + value);
      is_required.push_back(required.count(it.key()) > 0);
    }
    size_t n = members.size();
    // rest_i: members i.. after at least one member was written; first_i: none written yet.
    // Only first_0 and the first_i that follow an optional member are referenced; rest_0 never is.
    std::vector<std::string> rest(n + 1), first(n + 1);
    rest[n] = "\"\"";
    first[n] = "\"\"";
    for (size_t i = n; i-- > 0;) {
      if (i > 0) {
        std::string rest_body;
        if (is_required[i]) {
          rest_body = "\",\"" + s + members[i] + s + rest[i + 1];
        } else {
          rest_body = "(\",\"" + s + members[i] + s + ")? " + rest[i + 1];
        }
        rest[i] = AddRule(name + "_rest" + std::to_string(i), rest_body);
      }
      if (i == 0 || !is_required[i - 1]) {
        std::string first_body = members[i] + s + rest[i + 1];
        if (!is_required[i]) first_body += " | " + first[i + 1];
        first[i] = AddRule(name + "_first" + std::to_string(i), first_body);
      }
    }
    rules_[self].second = "\"{\"" + s + first[0] + " \"}\"";
    return name;
  }

  std::string VisitArray(const Json& schema, const std::string& hint) {
    std::string item;
    std::string name = AddRule(hint, "");
    size_t self = rules_.size() - 1;
    if (schema.contains("items")) {
      item = Visit(schema["items"], name + "_item");
    } else {
      item = Require("any_value");
    }
    int64_t min_items = 0;
    std::optional<int64_t> max_items;
    if (schema.contains("minItems")) {
      if (!schema["minItems"].is_number_unsigned()) {
        throw SchemaError("minItems must be a non-negative integer");
      }
      min_items = schema["minItems"].get<int64_t>();
    }
    if (schema.contains("maxItems")) {
      if (!schema["maxItems"].is_number_unsigned()) {
        throw SchemaError("maxItems must be a non-negative integer");
      }
      max_items = schema["maxItems"].get<int64_t>();
    }
    if (max_items && *max_items < min_items) throw SchemaError("maxItems is less than minItems");
    std::string s = Sep();
    std::string body;
    if (max_items && *max_items == 0) {
      body = "\"[\"" + s + "\"]\"";
    } else {
      std::string more = "(\",\"" + s + item + s + ")";
      int64_t lo = std::max<int64_t>(min_items - 1, 0);
      std::string bound = "{" + std::to_string(lo) + "," +
                          (max_items ? std::to_string(*max_items - 1) : "") + "}";
      std::string items = item + s + more + bound + " \"]\"";
      if (min_items == 0) {
        body = "\"[\"" + s + "(\"]\" | " + items + ")";
      } else {
        body = "\"[\"" + s + items;
      }
    }
    rules_[self].second = body;
    return name;
  }

  SchemaOptions options_;
  std::vector<std::pair<std::string, std::string>> rules_;
  std::set<std::string> used_names_ = {"root"};
  std::set<std::string> helpers_;
};

Json ParseSchema(std::string_view schema_json) {
  Json schema;
  try {
    schema = Json::parse(schema_json);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed schema JSON: ") + e.what());
  }
  std::vector<std::string> unsupported;
  CollectUnsupported(schema, "#", &unsupported);
  if (!unsupported.empty()) {
    std::string msg = "unsupported schema keywords:";
    for (const auto& u : unsupported) msg += " " + u;
    throw SchemaError(msg, unsupported);
  }
  return schema;
}

}  // namespace

std::string SchemaToGrammarText(std::string_view schema_json, const SchemaOptions& options) {
  Json schema = ParseSchema(schema_json);
  return SchemaConverter(options).Convert(schema);
}

Grammar SchemaToGrammar(std::string_view schema_json, const SchemaOptions& options) {
  std::string text = SchemaToGrammarText(schema_json, options);
  try {
    return ParseGrammar(text);
  } catch (const GrammarError& e) {
    throw SchemaError(std::string("generated grammar is invalid: ") + e.what());
  }
}

}  // namespace gmask
