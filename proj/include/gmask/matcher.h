/*!
 *  Copyright (c) 2026 by Contributors
 * \file gmask/matcher.h
 * \brief Runtime matcher: parallel stacks in a shared persistent tree, token masks, rollback,
 * branching, and jump-forward.
 */
#ifndef GMASK_MATCHER_H_
#define GMASK_MATCHER_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gmask/compiled_grammar.h"
#include "gmask/dynamic_bitset.h"
#include "gmask/pda.h"
#include "gmask/persistent_stack.h"

namespace gmask {

/*! \brief Counters from the most recent FillNextTokenMask call. */
struct MaskFillStats {
  int32_t num_tops = 0;
  /*! \brief Distinct stack-top nodes looked up in the cache. */
  int32_t num_lookups = 0;
  /*! \brief Tokens checked against a full stack (dependent tokens, or every token without a
   * cache). */
  int64_t tokens_checked = 0;
};

/*!
 * \brief A single-owner mutable matching state. Branches share the compiled grammar and the
 * stack tree, so distinct branches may be used from distinct threads; one matcher must not be
 * mutated concurrently.
 */
class GrammarMatcher {
 public:
  static constexpr int kDefaultHistoryWindow = 32;
  /*! \brief Dependent lists longer than this are checked in sorted order with prefix sharing. */
  static constexpr size_t kSortedCheckThreshold = 64;
  static constexpr size_t kMaxJumpForwardBytes = 1024;

  explicit GrammarMatcher(std::shared_ptr<const CompiledGrammar> grammar,
                          int history_window = kDefaultHistoryWindow);
  ~GrammarMatcher();
  GrammarMatcher(GrammarMatcher&&) noexcept;
  GrammarMatcher& operator=(GrammarMatcher&&) noexcept;
  GrammarMatcher(const GrammarMatcher&) = delete;
  GrammarMatcher& operator=(const GrammarMatcher&) = delete;

  /*!
   * \brief Consume one token. EOS is accepted only when the root rule can finish and then marks
   * the matcher terminated; other special tokens and the empty token are never accepted.
   * On false the state is unchanged.
   */
  bool AcceptToken(int32_t token_id);
  /*! \brief Consume raw bytes as one history step. The empty string is accepted as a no-op step. */
  bool AcceptBytes(std::string_view bytes);

  /*! \brief Undo the last `steps` successful accepts. Throws Error beyond the history window. */
  void Rollback(int steps);
  /*! \brief Independent copy sharing the stack tree; costs one reference per top. */
  GrammarMatcher Branch() const;

  /*! \brief Write the allowed-token bitset for the next step (all zero once terminated). */
  void FillNextTokenMask(DynamicBitset* mask);
  DynamicBitset GetNextTokenMask();
  const MaskFillStats& last_fill_stats() const;

  /*! \brief Bytes forced by the grammar from here, stopping where termination becomes legal,
   * at a choice between bytes, or after kMaxJumpForwardBytes. Does not change the state. */
  std::string FindJumpForwardBytes();

  bool CanTerminate() const;
  bool IsTerminated() const;
  int history_size() const;
  int history_window() const;
  int32_t num_tops() const;

  /*! \brief The current parallel stacks, sorted, frames listed bottom to top. */
  std::vector<OracleStack> CurrentStacks() const;

  const CompiledGrammar& grammar() const;
  const std::shared_ptr<PersistentStackTree>& arena() const;

 private:
  struct Impl;
  explicit GrammarMatcher(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace gmask

#endif  // GMASK_MATCHER_H_
