/*!
 *  Copyright (c) 2026 by Contributors
 * \file gmask/json_schema.h
 * \brief Conversion of a JSON Schema subset into a grammar.
 *
 * Supported keywords: type (object, array, string, number, integer, boolean, null, or a list of
 * these), properties, required, additionalProperties, items, enum, const, minItems, maxItems.
 * The annotations title, description, $schema, $id and $comment are accepted and ignored.
 * Objects with properties must set additionalProperties to false; their members are emitted in
 * schema order. An object schema without properties accepts any object (or only `{}` when
 * additionalProperties is false). Any other keyword raises SchemaError listing every offending
 * keyword.
 */
#ifndef GMASK_JSON_SCHEMA_H_
#define GMASK_JSON_SCHEMA_H_

#include <string>
#include <string_view>

#include "gmask/grammar.h"

namespace gmask {

struct SchemaOptions {
  /*! \brief When true no whitespace is allowed between JSON tokens. */
  bool strict_whitespace = false;
};

/*! \brief Grammar text for the schema. Throws SchemaError. */
std::string SchemaToGrammarText(std::string_view schema_json, const SchemaOptions& options = {});

/*! \brief Parsed and validated grammar for the schema. Throws SchemaError. */
Grammar SchemaToGrammar(std::string_view schema_json, const SchemaOptions& options = {});

}  // namespace gmask

#endif  // GMASK_JSON_SCHEMA_H_
