/*!
 *  Copyright (c) 2026 by Contributors
 * \file builtin_grammars.cc
 */
#include "gmask/builtin_grammars.h"

#include "gmask/error.h"
#include "gmask/json_schema.h"

namespace gmask {
namespace builtin {

std::string_view ArrayStringGrammar() {
  return R"GM(root ::= array | string
array ::= "[" elements
elements ::= value "]" | value "," elements
value ::= array | string
string ::= "\"" [^"\\]* "\""
)GM";
}

std::string_view JsonGrammar() {
  return R"GM(root ::= [ \t\n\r]* value [ \t\n\r]*
value ::= object | array | string | number | "true" | "false" | "null"
object ::= "{" [ \t\n\r]* (string [ \t\n\r]* ":" [ \t\n\r]* value [ \t\n\r]*
           ("," [ \t\n\r]* string [ \t\n\r]* ":" [ \t\n\r]* value [ \t\n\r]*)*)? "}"
array ::= "[" [ \t\n\r]* (value [ \t\n\r]* ("," [ \t\n\r]* value [ \t\n\r]*)*)? "]"
string ::= "\"" characters "\""
characters ::= ([^"\\\x00-\x1F] | "\\" escape)*
escape ::= ["\\/bfnrt] | "u" [0-9a-fA-F]{4}
number ::= "-"? ("0" | [1-9] [0-9]*) ("." [0-9]+)? ([eE] [+\-]? [0-9]+)?
)GM";
}

std::string_view ArithmeticGrammar() {
  return R"GM(root ::= term (("+" | "-") term)*
term ::= factor (("*" | "/") factor)*
factor ::= [0-9]+ | "(" root ")"
)GM";
}

std::string_view XmlGrammar() {
  return R"GM(root ::= element
element ::= "<a" attrs ">" content "</a>" | "<b" attrs ">" content "</b>" | "<br" attrs "/>"
attrs ::= (" " name "=\"" [^"<&]* "\"")*
name ::= [a-z]+
content ::= ([^<&] | entity | element)*
entity ::= "&" ("amp" | "lt" | "gt" | "quot") ";"
)GM";
}

std::string_view PersonSchema() {
  return R"GM({
  "type": "object",
  "properties": {
    "name": {"type": "string"},
    "age": {"type": "integer"},
    "email": {"type": "string"},
    "tags": {"type": "array", "items": {"type": "string"}, "maxItems": 3},
    "role": {"enum": ["admin", "user", "guest"]},
    "active": {"type": "boolean"}
  },
  "required": ["name", "age", "role"],
  "additionalProperties": false
})GM";
}

std::string BuiltinGrammarText(std::string_view name) {
  if (name == "array_string") return std::string(ArrayStringGrammar());
  if (name == "json") return std::string(JsonGrammar());
  if (name == "arithmetic") return std::string(ArithmeticGrammar());
  if (name == "xml") return std::string(XmlGrammar());
  if (name == "person_schema") return SchemaToGrammarText(PersonSchema());
  throw Error("unknown builtin grammar '" + std::string(name) + "'");
}

}  // namespace builtin
}  // namespace gmask
