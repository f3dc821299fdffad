/*!
 *  Copyright (c) 2026 by Contributors
 * \file utf8.h
 * \brief UTF-8 encoding helpers and code point range to byte-sequence lowering.
 */
#ifndef GMASK_SRC_UTF8_H_
#define GMASK_SRC_UTF8_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gmask/grammar.h"

namespace gmask {

constexpr uint32_t kMaxCodePoint = 0x10FFFF;

std::string EncodeUtf8(uint32_t code_point);

/*!
 * \brief Decode one code point starting at `*pos`, advancing it. Returns -1 and advances by one
 * byte on malformed input.
 */
int32_t DecodeUtf8(std::string_view s, size_t* pos);

/*!
 * \brief Split a code point range into byte-range sequences whose concatenations match exactly
 * the UTF-8 encodings of the range. Surrogates are excluded.
 */
std::vector<std::vector<ByteRange>> Utf8Sequences(uint32_t lo, uint32_t hi);

}  // namespace gmask

#endif  // GMASK_SRC_UTF8_H_
