/*!
 *  Copyright (c) 2026 by Contributors
 * \file gmask/vocabulary.h
 * \brief Tokenizer vocabulary as raw byte strings, plus the lexicographically sorted index used to
 * share work between tokens with common prefixes.
 */
#ifndef GMASK_VOCABULARY_H_
#define GMASK_VOCABULARY_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gmask {

/*!
 * \brief Token ids are dense 0..size-1. Special tokens (always including EOS) never take part in
 * grammar matching.
 *
 * File format (JSON, with `\xHH` additionally allowed inside strings to denote a raw byte):
 *
 *   {"byte_level": false, "eos_id": 3, "special": [3], "tokens": ["a", "b", "ab", "<eos>"]}
 *
 * With "byte_level": true, non-special token strings use the GPT-2 printable byte alphabet
 * (for example "Ġa" is the two bytes 0x20 0x61) and are mapped back to raw bytes on load.
 */
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> tokens, int32_t eos_id, std::vector<int32_t> special_ids);

  static Vocabulary FromJson(std::string_view text);
  static Vocabulary Load(const std::string& path);
  /*! \brief Serialize in the file format above with byte_level false. */
  std::string ToJson() const;
  void Save(const std::string& path) const;

  int32_t size() const { return static_cast<int32_t>(tokens_.size()); }
  const std::string& token(int32_t id) const { return tokens_[id]; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  int32_t eos_id() const { return eos_id_; }
  bool IsSpecial(int32_t id) const { return is_special_[id]; }
  const std::vector<int32_t>& special_ids() const { return special_ids_; }

  /*! \brief FNV-1a 64 over the token bytes, EOS id and special ids. */
  uint64_t Hash() const { return hash_; }

 private:
  std::vector<std::string> tokens_;
  std::vector<bool> is_special_;
  std::vector<int32_t> special_ids_;
  int32_t eos_id_ = -1;
  uint64_t hash_ = 0;
};

/*! \brief Map a GPT-2 byte-level token string back to raw bytes. Throws Error on characters
 * outside the byte alphabet. */
std::string DecodeByteLevel(std::string_view text);

/*!
 * \brief Non-special, non-empty tokens in ascending byte order. Ties keep ascending id order.
 * lcp[k] is the common prefix length of order[k] and order[k-1]; lcp[0] = 0.
 */
struct SortedVocabIndex {
  std::vector<int32_t> order;
  std::vector<int32_t> lcp;
  int64_t total_bytes = 0;
  int64_t shared_bytes = 0;
};

SortedVocabIndex BuildSortedIndex(const Vocabulary& vocab);

/*! \brief (sum of lengths - sum of lcp) / (sum of lengths): share of bytes still checked. */
double SavedCharsRatio(const SortedVocabIndex& index);

/*!
 * \brief Deterministic synthetic byte-level vocabulary of `size` tokens resembling a BPE
 * vocabulary: all 256 single bytes, words with and without a leading space, numbers, code and
 * JSON punctuation clusters, whitespace runs, UTF-8 words, and the specials <eos>, <bos>, <pad>,
 * <unk> at the end. EOS is the first special.
 */
Vocabulary SyntheticVocabulary(int32_t size = 32000, uint64_t seed = 20260101);

/*! \brief A fixed 200-token vocabulary (printable ASCII, grammar-relevant multi-byte tokens, a few
 * UTF-8 pieces, and the EOS token) for exhaustive tests. */
Vocabulary ToyVocabulary();

}  // namespace gmask

#endif  // GMASK_VOCABULARY_H_
