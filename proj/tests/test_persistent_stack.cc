/*!
 *  Copyright (c) 2026 by Contributors
 * \file test_persistent_stack.cc
 */
#include <gtest/gtest.h>

#include <random>
#include <thread>
#include <vector>

#include "gmask/error.h"
#include "gmask/persistent_stack.h"

namespace gmask {
namespace {

constexpr uint32_t kEmpty = PersistentStackTree::kEmpty;

TEST(PersistentStackTree, SharesEqualFramesAndCountsReferences) {
  PersistentStackTree t;
  uint32_t a = t.Push(kEmpty, 1);
  uint32_t b = t.Push(a, 2);
  uint32_t b2 = t.Push(a, 2);
  EXPECT_EQ(b, b2);
  EXPECT_EQ(t.num_live(), 2u);
  EXPECT_EQ(t.RefCount(a), 2u);  // the holder plus the child
  EXPECT_EQ(t.RefCount(b), 2u);
  EXPECT_EQ(t.Node(b), 2);
  EXPECT_EQ(t.Parent(b), a);
  t.Release(a);
  EXPECT_EQ(t.num_live(), 2u);  // still held by b
  t.Release(b);
  EXPECT_EQ(t.num_live(), 2u);
  t.Release(b2);
  EXPECT_EQ(t.num_live(), 0u);
}

TEST(PersistentStackTree, ReusesReclaimedSlots) {
  PersistentStackTree t;
  uint32_t top = kEmpty;
  for (int i = 0; i < 100; ++i) {
    uint32_t next = t.Push(top, i);
    if (top != kEmpty) t.Release(top);
    top = next;
  }
  EXPECT_EQ(t.num_live(), 100u);
  t.Release(top);
  EXPECT_EQ(t.num_live(), 0u);
  size_t allocated = t.num_allocated();
  uint32_t again = t.Push(kEmpty, 5);
  EXPECT_EQ(t.num_allocated(), allocated);
  t.Release(again);
}

TEST(PersistentStackTree, RandomOperationsMatchModel) {
  PersistentStackTree t;
  std::mt19937_64 rng(17);
  // Model: each held handle with the explicit stack it denotes.
  std::vector<std::pair<uint32_t, std::vector<int32_t>>> held;
  for (int step = 0; step < 20000; ++step) {
    int op = static_cast<int>(rng() % 3);
    if (op == 0 || held.empty()) {
      int32_t node = static_cast<int32_t>(rng() % 4);
      if (held.empty() || rng() % 4 == 0) {
        held.push_back({t.Push(kEmpty, node), {node}});
      } else {
        auto [h, s] = held[rng() % held.size()];
        s.push_back(node);
        held.push_back({t.Push(h, node), s});
      }
    } else if (op == 1) {
      auto [h, s] = held[rng() % held.size()];
      t.Retain(h);
      held.push_back({h, s});
    } else {
      size_t i = rng() % held.size();
      t.Release(held[i].first);
      held.erase(held.begin() + static_cast<std::ptrdiff_t>(i));
    }
    if (step % 500 == 0) {
      for (const auto& [h, s] : held) {
        std::vector<int32_t> got;
        for (uint32_t f = h; f != kEmpty; f = t.Parent(f)) got.insert(got.begin(), t.Node(f));
        ASSERT_EQ(got, s);
      }
    }
  }
  for (const auto& [h, s] : held) t.Release(h);
  EXPECT_EQ(t.num_live(), 0u);
}

TEST(PersistentStackTree, ReleasingDeadFrameThrows) {
  PersistentStackTree t;
  uint32_t a = t.Push(kEmpty, 1);
  uint32_t b = t.Push(a, 2);
  t.Release(b);
  t.Release(a);
  EXPECT_THROW(t.Release(a), Error);
}

TEST(PersistentStackTree, ConcurrentPushAndRelease) {
  PersistentStackTree t;
  uint32_t base = t.Push(kEmpty, 0);
  std::vector<std::thread> threads;
  for (int k = 0; k < 4; ++k) {
    threads.emplace_back([&, k] {
      for (int i = 0; i < 5000; ++i) {
        uint32_t h = t.Push(base, k * 10000 + i % 50);
        ASSERT_EQ(t.Parent(h), base);
        t.Release(h);
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(t.num_live(), 1u);
  t.Release(base);
}

}  // namespace
}  // namespace gmask
