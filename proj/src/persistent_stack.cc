/*!
 *  Copyright (c) 2026 by Contributors
 * \file persistent_stack.cc
 */
#include "gmask/persistent_stack.h"

#include "gmask/error.h"

namespace gmask {

PersistentStackTree::PersistentStackTree() : chunks_(new std::atomic<Slot*>[kMaxChunks]) {
  for (uint32_t i = 0; i < kMaxChunks; ++i) chunks_[i].store(nullptr, std::memory_order_relaxed);
}

PersistentStackTree::~PersistentStackTree() {
  for (uint32_t i = 0; i < kMaxChunks; ++i) delete[] chunks_[i].load(std::memory_order_relaxed);
}

uint32_t PersistentStackTree::Push(uint32_t parent, int32_t node) {
  std::lock_guard<std::mutex> guard(mu_);
  return PushLocked(parent, node);
}

uint32_t PersistentStackTree::PushLocked(uint32_t parent, int32_t node) {
  uint64_t key = Key(parent, node);
  auto it = index_.find(key);
  if (it != index_.end()) {
    ++MutableSlot(it->second).refcount;
    return it->second;
  }
  uint32_t h;
  if (!free_.empty()) {
    h = free_.back();
    free_.pop_back();
  } else {
    h = num_slots_++;
    GMASK_CHECK(h < kMaxChunks * kChunkSize) << "stack arena exhausted";
    if ((h & (kChunkSize - 1)) == 0) {
      chunks_[h >> kChunkBits].store(new Slot[kChunkSize], std::memory_order_release);
    }
  }
  Slot& slot = MutableSlot(h);
  slot.parent = parent;
  slot.node = node;
  slot.refcount = 1;
  if (parent != kEmpty) ++MutableSlot(parent).refcount;
  index_.emplace(key, h);
  ++num_live_;
  ++num_created_;
  return h;
}

void PersistentStackTree::Retain(uint32_t handle) {
  if (handle == kEmpty) return;
  std::lock_guard<std::mutex> guard(mu_);
  ++MutableSlot(handle).refcount;
}

void PersistentStackTree::Release(uint32_t handle) {
  std::lock_guard<std::mutex> guard(mu_);
  ReleaseLocked(handle);
}

void PersistentStackTree::ReleaseLocked(uint32_t handle) {
  while (handle != kEmpty) {
    Slot& slot = MutableSlot(handle);
    GMASK_CHECK(slot.refcount > 0) << "release of a dead stack frame";
    if (--slot.refcount > 0) return;
    index_.erase(Key(slot.parent, slot.node));
    free_.push_back(handle);
    --num_live_;
    handle = slot.parent;
  }
}

size_t PersistentStackTree::num_live() const {
  std::lock_guard<std::mutex> guard(mu_);
  return num_live_;
}

size_t PersistentStackTree::num_allocated() const {
  std::lock_guard<std::mutex> guard(mu_);
  return num_slots_;
}

uint64_t PersistentStackTree::num_created() const {
  std::lock_guard<std::mutex> guard(mu_);
  return num_created_;
}

uint32_t PersistentStackTree::RefCount(uint32_t handle) const {
  std::lock_guard<std::mutex> guard(mu_);
  return SlotAt(handle).refcount;
}

}  // namespace gmask
