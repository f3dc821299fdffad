/*!
 *  Copyright (c) 2026 by Contributors
 * \file stack_engine.h
 * \brief Parallel-stack stepping shared by cache preprocessing and the runtime matcher.
 */
#ifndef GMASK_SRC_STACK_ENGINE_H_
#define GMASK_SRC_STACK_ENGINE_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gmask/pda.h"
#include "gmask/persistent_stack.h"

namespace gmask {

/*! \brief Frame reference meaning "no frame": popping it finishes the bottom rule. */
constexpr uint32_t kBottomFrame = 0xFFFFFFFFu;
static_assert(kBottomFrame == PersistentStackTree::kEmpty);
/*! \brief High bit marks frames living in the engine's scratch pool rather than the arena. */
constexpr uint32_t kScratchTag = 0x80000000u;

/*! \brief A stack top: current PDA node plus the frame chain below it. */
struct StackTop {
  int32_t node;
  uint32_t frame;
  bool operator==(const StackTop&) const = default;
  bool operator<(const StackTop& o) const {
    return node != o.node ? node < o.node : frame < o.frame;
  }
};

/*! \brief Edge lists flattened for fast stepping. */
struct FlatPda {
  struct CharEdge {
    ByteSet bytes;
    int32_t dst;
  };
  struct RefEdge {
    int32_t rule_start;
    int32_t dst;
  };
  explicit FlatPda(const Pda& pda);

  std::vector<uint32_t> char_begin;
  std::vector<CharEdge> char_edges;
  std::vector<uint32_t> eps_begin;
  std::vector<int32_t> eps_edges;
  std::vector<uint32_t> ref_begin;
  std::vector<RefEdge> ref_edges;
  std::vector<uint8_t> final;
  int32_t root_start;

  bool Scannable(int32_t n) const { return char_begin[n] != char_begin[n + 1]; }
};

/*! \brief Open-addressing set of 64-bit keys cleared in O(1) by bumping an epoch. */
class EpochSet {
 public:
  EpochSet() { Resize(64); }
  void Clear();
  /*! \brief Returns true if the key was not present. */
  bool Insert(uint64_t key);

 private:
  void Resize(size_t capacity);
  static size_t Hash(uint64_t key) {
    key ^= key >> 33;
    key *= 0xff51afd7ed558ccdULL;
    key ^= key >> 33;
    return static_cast<size_t>(key);
  }
  std::vector<uint64_t> keys_;
  std::vector<uint32_t> stamps_;
  uint32_t epoch_ = 1;
  size_t count_ = 0;
  size_t mask_ = 0;
};

/*!
 * \brief Steps sets of stack tops by one byte and computes closures (epsilon moves, pushes on rule
 * references, pops at final nodes). Pushed frames go to a scratch pool that can be rolled back to
 * a mark; frames below them may live in a shared arena.
 *
 * Closure outputs only scannable tops (nodes with character edges). When a final node is reached
 * with kBottomFrame beneath it, `bottom_popped` is set: in preprocessing this means the token left
 * the rule under test, at runtime it means the root rule can finish.
 */
class StackEngine {
 public:
  StackEngine(std::shared_ptr<const FlatPda> flat, const PersistentStackTree* arena);
  /*! \brief A fresh engine sharing the flattened PDA and arena, with an empty scratch pool. */
  StackEngine Fork() const { return StackEngine(flat_, arena_); }

  void Closure(std::vector<StackTop>* seeds, std::vector<StackTop>* out, bool* bottom_popped);
  void Step(std::span<const StackTop> tops, uint8_t byte, std::vector<StackTop>* out,
            bool* bottom_popped);

  uint32_t PushScratch(uint32_t parent, int32_t node);
  int32_t FrameNode(uint32_t ref) const {
    return (ref & kScratchTag) ? scratch_[ref & ~kScratchTag].node : arena_->Node(ref);
  }
  uint32_t FrameParent(uint32_t ref) const {
    return (ref & kScratchTag) ? scratch_[ref & ~kScratchTag].parent : arena_->Parent(ref);
  }
  static bool IsScratch(uint32_t ref) { return ref != kBottomFrame && (ref & kScratchTag); }

  size_t ScratchMark() const { return scratch_.size(); }
  void ScratchTruncate(size_t mark);

  const FlatPda& flat() const { return *flat_; }
  const std::shared_ptr<const FlatPda>& flat_ptr() const { return flat_; }

 private:
  struct ScratchFrame {
    uint32_t parent;
    int32_t node;
  };
  static uint64_t Key(int32_t node, uint32_t frame) {
    return (uint64_t{static_cast<uint32_t>(node)} << 32) | frame;
  }

  std::shared_ptr<const FlatPda> flat_;
  const PersistentStackTree* arena_;
  std::vector<ScratchFrame> scratch_;
  std::unordered_map<uint64_t, uint32_t> scratch_index_;
  std::vector<StackTop> work_;
  std::vector<StackTop> seeds_;
  EpochSet visited_;
};

/*!
 * \brief Walks tokens byte by byte from a fixed start set, keeping one level per consumed byte so
 * that a following token sharing a prefix resumes from the shared level (rollback instead of
 * recomputation).
 */
class PrefixWalker {
 public:
  explicit PrefixWalker(StackEngine* engine) : engine_(engine) {}

  /*! \brief Set level 0. The start tops are used as given (no closure). */
  void Reset(std::span<const StackTop> start);
  /*! \brief Extend from level `lcp` through all bytes of `token`. */
  void Walk(std::string_view token, size_t lcp);

  size_t depth() const { return depth_; }
  const std::vector<StackTop>& tops(size_t level) const { return levels_[level].tops; }
  bool bottom_popped(size_t level) const { return levels_[level].bottom_popped; }
  /*! \brief Token fully consumed with a live stack or a completed bottom rule. */
  bool AcceptedAt(size_t level) const {
    return !levels_[level].tops.empty() || levels_[level].bottom_popped;
  }
  uint64_t bytes_examined() const { return bytes_examined_; }
  void ResetCounter() { bytes_examined_ = 0; }

 private:
  struct Level {
    std::vector<StackTop> tops;
    bool bottom_popped = false;
    size_t scratch_mark = 0;
  };
  StackEngine* engine_;
  std::vector<Level> levels_;
  size_t depth_ = 0;
  uint64_t bytes_examined_ = 0;
};

}  // namespace gmask

#endif  // GMASK_SRC_STACK_ENGINE_H_
