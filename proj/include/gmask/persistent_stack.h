/*!
 *  Copyright (c) 2026 by Contributors
 * \file gmask/persistent_stack.h
 * \brief Tree of stack frames shared by all parallel stacks, their history, and branches.
 */
#ifndef GMASK_PERSISTENT_STACK_H_
#define GMASK_PERSISTENT_STACK_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

namespace gmask {

/*!
 * \brief Each tree node is one stack frame holding a return node; a stack is the path from a
 * frame up to the root. Frames are hash-consed on (parent, return node), so equal stacks share
 * storage, and reference counted (children plus external holders). Frames whose count drops to
 * zero are recycled.
 *
 * Mutations take an internal lock; Node() and Parent() are lock-free and safe on any handle the
 * caller holds a reference to. Storage is chunked so published frames never move.
 */
class PersistentStackTree {
 public:
  static constexpr uint32_t kEmpty = 0xFFFFFFFFu;

  PersistentStackTree();
  ~PersistentStackTree();
  PersistentStackTree(const PersistentStackTree&) = delete;
  PersistentStackTree& operator=(const PersistentStackTree&) = delete;

  /*! \brief Frame (parent, node); the caller receives one reference. `parent` is borrowed. */
  uint32_t Push(uint32_t parent, int32_t node);
  void Retain(uint32_t handle);
  void Release(uint32_t handle);

  int32_t Node(uint32_t handle) const { return SlotAt(handle).node; }
  uint32_t Parent(uint32_t handle) const { return SlotAt(handle).parent; }

  /*! \brief Frames currently alive. */
  size_t num_live() const;
  /*! \brief Slots ever allocated (high-water mark of the arena). */
  size_t num_allocated() const;
  /*! \brief Number of Push calls that created a new frame. */
  uint64_t num_created() const;
  uint32_t RefCount(uint32_t handle) const;

  /*! \brief Unlocked variants for callers that already hold lock(). */
  std::unique_lock<std::mutex> lock() const { return std::unique_lock<std::mutex>(mu_); }
  uint32_t PushLocked(uint32_t parent, int32_t node);
  void RetainLocked(uint32_t handle) {
    if (handle != kEmpty) ++MutableSlot(handle).refcount;
  }
  void ReleaseLocked(uint32_t handle);

 private:
  struct Slot {
    uint32_t parent;
    int32_t node;
    uint32_t refcount;
  };
  static constexpr int kChunkBits = 12;
  static constexpr uint32_t kChunkSize = 1u << kChunkBits;
  static constexpr uint32_t kMaxChunks = 1u << 16;

  const Slot& SlotAt(uint32_t h) const {
    return chunks_[h >> kChunkBits].load(std::memory_order_acquire)[h & (kChunkSize - 1)];
  }
  Slot& MutableSlot(uint32_t h) {
    return chunks_[h >> kChunkBits].load(std::memory_order_relaxed)[h & (kChunkSize - 1)];
  }
  static uint64_t Key(uint32_t parent, int32_t node) {
    return (uint64_t{parent} << 32) | static_cast<uint32_t>(node);
  }

  mutable std::mutex mu_;
  std::unique_ptr<std::atomic<Slot*>[]> chunks_;
  uint32_t num_slots_ = 0;
  size_t num_live_ = 0;
  uint64_t num_created_ = 0;
  std::vector<uint32_t> free_;
  std::unordered_map<uint64_t, uint32_t> index_;
};

}  // namespace gmask

#endif  // GMASK_PERSISTENT_STACK_H_
