/*!
 *  Copyright (c) 2026 by Contributors
 * \file gmask/builtin_grammars.h
 * \brief Grammars shipped with the library, used by tests, benchmarks and the CLI.
 */
#ifndef GMASK_BUILTIN_GRAMMARS_H_
#define GMASK_BUILTIN_GRAMMARS_H_

#include <string>
#include <string_view>

namespace gmask {
namespace builtin {

/*! \brief Nested arrays of strings: `["a", ["b"]]` or a bare string. */
std::string_view ArrayStringGrammar();

/*! \brief JSON text per ECMA-404. */
std::string_view JsonGrammar();

/*! \brief Integer arithmetic with + - * / and parentheses, in three rules. */
std::string_view ArithmeticGrammar();

/*! \brief A small XML fragment language with tags <a>, <b>, <br/>, attributes and entities. */
std::string_view XmlGrammar();

/*! \brief A JSON Schema document describing a person record, compiled by SchemaToGrammar. */
std::string_view PersonSchema();

/*!
 * \brief Grammar text by name: "array_string", "json", "arithmetic", "xml", "person_schema"
 * (the schema is compiled). Throws Error for an unknown name.
 */
std::string BuiltinGrammarText(std::string_view name);

}  // namespace builtin
}  // namespace gmask

#endif  // GMASK_BUILTIN_GRAMMARS_H_
