/*!
 *  Copyright (c) 2026 by Contributors
 * \file gmask/mask_cache.h
 * \brief Per-node token classification, context expansion, and the adaptive token mask cache.
 */
#ifndef GMASK_MASK_CACHE_H_
#define GMASK_MASK_CACHE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gmask/dynamic_bitset.h"
#include "gmask/pda.h"
#include "gmask/vocabulary.h"

namespace gmask {

enum class TokenClass : uint8_t { kAccepted = 0, kRejected = 1, kDependent = 2 };

const char* TokenClassName(TokenClass c);

/*! \brief Outcome of matching one token from a node over a synthetic bottom frame. */
struct ClassifyResult {
  TokenClass cls;
  /*! \brief Byte offsets at which a branch finished the node's rule before the token ended. */
  std::vector<int32_t> pop_offsets;
};

/*!
 * \brief Match `token` starting at stack top `node`. Accepted: some branch consumes every byte
 * while staying inside the node's rule (or finishes it exactly at the last byte). Dependent: no
 * such branch, but some branch finishes the rule with bytes left over. Rejected otherwise.
 * Nodes of an unreferenced root rule never have a frame below them: finishing the root ends the
 * output, so leftover bytes reject the token there.
 */
ClassifyResult ClassifyToken(const Pda& pda, int32_t node, std::string_view token);

/*! rief True if `node` belongs to the root rule and no edge references the root. */
bool IsOutermostNode(const Pda& pda, int32_t node);

/*!
 * \brief For each rule, the character continuations that may follow the rule inside any parent
 * rule, as a node-set automaton over the Pda (the expanded suffix).
 *
 * For a rule R, the start states are the return targets of every edge referencing R. Character
 * and epsilon edges are followed; a node that is final in its rule or has a rule-reference edge
 * ends the known suffix and accepts. When the root rule is referenced nowhere, its final nodes
 * mark the end of all output: they do not accept, but their character edges are still followed.
 */
class ContextExpansion {
 public:
  ContextExpansion() = default;
  explicit ContextExpansion(const Pda& pda);

  /*! \brief Nothing is known about what follows the rule (referenced nowhere). */
  bool Unknown(int32_t rule) const { return mode_[rule] == Mode::kUnknown; }
  /*! \brief The rule is the unreferenced root: finishing it ends the output. */
  bool EndsOutput(int32_t rule) const { return mode_[rule] == Mode::kEndsOutput; }
  const std::vector<int32_t>& starts(int32_t rule) const { return starts_[rule]; }

  /*!
   * \brief True when `rest` could follow a completion of `rule`: a run of the suffix automaton
   * either consumes all of `rest` or reaches an accepting node first. Always true for kUnknown.
   */
  bool Admits(int32_t rule, std::string_view rest) const;

  /*! \brief Accepting nodes (final in their rule or with a reference edge), for tests. */
  bool IsStop(int32_t node) const { return stop_[node]; }

 private:
  enum class Mode : uint8_t { kSuffix, kUnknown, kEndsOutput };
  const Pda* pda_ = nullptr;
  std::vector<Mode> mode_;
  std::vector<std::vector<int32_t>> starts_;
  std::vector<uint8_t> stop_;
};

/*! \brief Reclassify a dependent token using the expanded suffix of the node's rule. */
TokenClass RefineDependent(const Pda& pda, const ContextExpansion& ctx, int32_t node,
                           std::string_view token, const ClassifyResult& result);

enum class StorageKind : uint8_t { kAcceptHeavy = 0, kRejectHeavy = 1, kBitset = 2 };

const char* StorageKindName(StorageKind k);

/*!
 * \brief One cache entry. Token groups partition the non-special vocabulary.
 * AcceptHeavy stores rejected ids, RejectHeavy stores accepted ids, Bitset stores accepted bits;
 * all three store the dependent ids. Id lists are sorted.
 */
struct MaskCacheEntry {
  StorageKind kind = StorageKind::kRejectHeavy;
  std::vector<int32_t> ids;
  DynamicBitset accept_bits;
  std::vector<int32_t> dependent;
  int32_t num_accepted = 0;
  int32_t num_rejected = 0;

  /*! \brief Payload bytes: 4 per stored id plus ceil(vocab/8) for the bitset form. */
  size_t PayloadBytes(int32_t vocab_size) const;
  /*! \brief Size of the serialized record including its header. */
  size_t SerializedBytes(int32_t vocab_size) const;

  void Serialize(std::string* out) const;
  static MaskCacheEntry Deserialize(std::string_view data, size_t* pos, int32_t vocab_size);

  /*! \brief Rebuild the per-token classes over all ids (specials come out kRejected). */
  std::vector<TokenClass> Decode(const Vocabulary& vocab) const;

  bool operator==(const MaskCacheEntry&) const = default;
};

/*! \brief Byte size of each storage form; accepted + rejected + dependent = non-special vocab. */
size_t StorageBytes(StorageKind kind, size_t accepted, size_t rejected, size_t dependent,
                    int32_t vocab_size);

/*! \brief Pick the byte-minimal form; ties resolve AcceptHeavy, RejectHeavy, Bitset. */
MaskCacheEntry ChooseStorage(const std::vector<int32_t>& accepted,
                             const std::vector<int32_t>& rejected,
                             const std::vector<int32_t>& dependent, int32_t vocab_size);

struct MaskCacheOptions {
  bool context_expansion = true;
  int num_threads = 1;
};

struct MaskCacheStats {
  int32_t num_entries = 0;
  int64_t total_accepted = 0;
  int64_t total_rejected = 0;
  int64_t total_dependent = 0;
  /*! \brief Dependent count before context expansion refined it. */
  int64_t total_dependent_unrefined = 0;
  /*! \brief Byte positions stepped during the sorted traversal, summed over entries. */
  int64_t bytes_examined = 0;
  size_t serialized_bytes = 0;
  size_t all_bitset_bytes = 0;
  double build_seconds = 0;
};

/*! \brief Entries keyed by PDA node, for every scannable node reachable from the root start. */
class TokenMaskCache {
 public:
  TokenMaskCache() = default;

  const MaskCacheEntry* Find(int32_t node) const {
    return node < static_cast<int32_t>(index_.size()) && index_[node] >= 0
               ? &entries_[index_[node]]
               : nullptr;
  }
  const std::vector<int32_t>& keys() const { return keys_; }
  const std::vector<MaskCacheEntry>& entries() const { return entries_; }
  int32_t vocab_size() const { return vocab_size_; }
  const MaskCacheStats& stats() const { return stats_; }
  /*! \brief Bytes examined for each entry, in key order (instrumentation). */
  const std::vector<int64_t>& bytes_examined_per_entry() const { return bytes_examined_; }

  void Serialize(std::string* out) const;
  static TokenMaskCache Deserialize(std::string_view data, size_t* pos, int32_t num_nodes);

  bool operator==(const TokenMaskCache& o) const {
    return keys_ == o.keys_ && entries_ == o.entries_ && vocab_size_ == o.vocab_size_;
  }

 private:
  friend TokenMaskCache BuildMaskCache(const Pda&, const Vocabulary&, const SortedVocabIndex&,
                                       const MaskCacheOptions&);
  void Finish(int32_t num_nodes);

  std::vector<int32_t> keys_;
  std::vector<MaskCacheEntry> entries_;
  std::vector<int32_t> index_;
  std::vector<int64_t> bytes_examined_;
  int32_t vocab_size_ = 0;
  MaskCacheStats stats_;
};

/*! \brief Scannable nodes reachable from the root start, ascending. */
std::vector<int32_t> ReachableScannableNodes(const Pda& pda);

TokenMaskCache BuildMaskCache(const Pda& pda, const Vocabulary& vocab,
                              const SortedVocabIndex& index, const MaskCacheOptions& options = {});

}  // namespace gmask

#endif  // GMASK_MASK_CACHE_H_
