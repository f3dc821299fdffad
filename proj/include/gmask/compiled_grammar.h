/*!
 *  Copyright (c) 2026 by Contributors
 * \file gmask/compiled_grammar.h
 * \brief A grammar compiled against one vocabulary: the optimized Pda, the token mask cache, and
 * the bundle file that stores them.
 */
#ifndef GMASK_COMPILED_GRAMMAR_H_
#define GMASK_COMPILED_GRAMMAR_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gmask/grammar.h"
#include "gmask/mask_cache.h"
#include "gmask/pda.h"
#include "gmask/vocabulary.h"

namespace gmask {

struct FlatPda;

struct CompileOptions {
  bool inline_rules = true;
  bool merge_nodes = true;
  /*! \brief Build the token mask cache. Without it every mask is computed token by token. */
  bool use_cache = true;
  /*! \brief Refine dependent tokens with context expansion; ignored without the cache. */
  bool context_expansion = true;
  int num_threads = 1;
};

/*!
 * \brief Immutable once built and shareable between matchers and threads.
 *
 * Bundle layout (little endian): magic "GMC1", u32 version, u32 flags (bit 0 inline, bit 1 merge,
 * bit 2 cache, bit 3 context expansion), u64 vocabulary hash, i32 vocabulary size, grammar text,
 * Pda, then the cache when bit 2 is set. See docs/bundle_format.md.
 */
class CompiledGrammar {
 public:
  static constexpr uint32_t kBundleVersion = 1;

  static std::shared_ptr<const CompiledGrammar> Compile(const Grammar& grammar,
                                                        std::shared_ptr<const Vocabulary> vocab,
                                                        const CompileOptions& options = {});
  static std::shared_ptr<const CompiledGrammar> Compile(std::string_view grammar_text,
                                                        std::shared_ptr<const Vocabulary> vocab,
                                                        const CompileOptions& options = {});

  std::string Serialize() const;
  /*! \brief Throws VocabMismatchError if `vocab` is not the one the bundle was built for. */
  static std::shared_ptr<const CompiledGrammar> Deserialize(
      std::string_view data, std::shared_ptr<const Vocabulary> vocab);
  void Save(const std::string& path) const;
  static std::shared_ptr<const CompiledGrammar> Load(const std::string& path,
                                                     std::shared_ptr<const Vocabulary> vocab);

  const std::string& grammar_text() const { return grammar_text_; }
  const Pda& pda() const { return pda_; }
  const Vocabulary& vocab() const { return *vocab_; }
  const std::shared_ptr<const Vocabulary>& vocab_ptr() const { return vocab_; }
  /*! \brief Null when compiled without the cache. */
  const TokenMaskCache* cache() const { return cache_ ? &*cache_ : nullptr; }
  const CompileOptions& options() const { return options_; }
  const SortedVocabIndex& sorted_index() const { return index_; }
  /*! \brief Position of each token in sorted_index().order, -1 for tokens not in it. */
  const std::vector<int32_t>& sorted_rank() const { return rank_; }
  const std::shared_ptr<const FlatPda>& flat() const { return flat_; }

 private:
  CompiledGrammar() = default;
  void Finish();

  std::string grammar_text_;
  Pda pda_;
  std::shared_ptr<const Vocabulary> vocab_;
  std::optional<TokenMaskCache> cache_;
  CompileOptions options_;
  SortedVocabIndex index_;
  std::vector<int32_t> rank_;
  std::shared_ptr<const FlatPda> flat_;
};

}  // namespace gmask

#endif  // GMASK_COMPILED_GRAMMAR_H_
