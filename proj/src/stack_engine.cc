/*!
 *  Copyright (c) 2026 by Contributors
 * \file stack_engine.cc
 */
#include "stack_engine.h"

namespace gmask {

FlatPda::FlatPda(const Pda& pda) : root_start(pda.root_start()) {
  int32_t n = pda.num_nodes();
  char_begin.reserve(n + 1);
  eps_begin.reserve(n + 1);
  ref_begin.reserve(n + 1);
  final.resize(n);
  for (int32_t i = 0; i < n; ++i) {
    char_begin.push_back(static_cast<uint32_t>(char_edges.size()));
    eps_begin.push_back(static_cast<uint32_t>(eps_edges.size()));
    ref_begin.push_back(static_cast<uint32_t>(ref_edges.size()));
    final[i] = pda.node(i).final ? 1 : 0;
    for (const auto& e : pda.OutEdges(i)) {
      switch (e.kind) {
        case EdgeKind::kChar:
          char_edges.push_back({e.bytes, e.dst});
          break;
        case EdgeKind::kEpsilon:
          eps_edges.push_back(e.dst);
          break;
        case EdgeKind::kRuleRef:
          ref_edges.push_back({pda.rule(e.rule_ref).start, e.dst});
          break;
      }
    }
  }
  char_begin.push_back(static_cast<uint32_t>(char_edges.size()));
  eps_begin.push_back(static_cast<uint32_t>(eps_edges.size()));
  ref_begin.push_back(static_cast<uint32_t>(ref_edges.size()));
}

void EpochSet::Resize(size_t capacity) {
  std::vector<uint64_t> old_keys = std::move(keys_);
  std::vector<uint32_t> old_stamps = std::move(stamps_);
  keys_.assign(capacity, 0);
  stamps_.assign(capacity, 0);
  mask_ = capacity - 1;
  uint32_t old_epoch = epoch_;
  epoch_ = 1;
  count_ = 0;
  for (size_t i = 0; i < old_keys.size(); ++i) {
    if (old_stamps[i] == old_epoch) Insert(old_keys[i]);
  }
}

void EpochSet::Clear() {
  count_ = 0;
  if (++epoch_ == 0) {
    std::fill(stamps_.begin(), stamps_.end(), 0);
    epoch_ = 1;
  }
}

bool EpochSet::Insert(uint64_t key) {
  if ((count_ + 1) * 2 > keys_.size()) Resize(keys_.size() * 2);
  size_t h = Hash(key) & mask_;
  while (stamps_[h] == epoch_) {
    if (keys_[h] == key) return false;
    h = (h + 1) & mask_;
  }
  stamps_[h] = epoch_;
  keys_[h] = key;
  ++count_;
  return true;
}

StackEngine::StackEngine(std::shared_ptr<const FlatPda> flat, const PersistentStackTree* arena)
    : flat_(std::move(flat)), arena_(arena) {}

uint32_t StackEngine::PushScratch(uint32_t parent, int32_t node) {
  uint64_t key = (uint64_t{parent} << 32) | static_cast<uint32_t>(node);
  auto it = scratch_index_.find(key);
  if (it != scratch_index_.end()) return it->second;
  uint32_t ref = static_cast<uint32_t>(scratch_.size()) | kScratchTag;
  scratch_.push_back({parent, node});
  scratch_index_.emplace(key, ref);
  return ref;
}

void StackEngine::ScratchTruncate(size_t mark) {
  while (scratch_.size() > mark) {
    const auto& f = scratch_.back();
    scratch_index_.erase((uint64_t{f.parent} << 32) | static_cast<uint32_t>(f.node));
    scratch_.pop_back();
  }
}

void StackEngine::Closure(std::vector<StackTop>* seeds, std::vector<StackTop>* out,
                          bool* bottom_popped) {
  const FlatPda& g = *flat_;
  visited_.Clear();
  work_.clear();
  for (const auto& s : *seeds) {
    if (visited_.Insert(Key(s.node, s.frame))) work_.push_back(s);
  }
  auto visit = [&](int32_t node, uint32_t frame) {
    if (visited_.Insert(Key(node, frame))) work_.push_back({node, frame});
  };
  // Work is processed in insertion order so the output order is deterministic.
  for (size_t i = 0; i < work_.size(); ++i) {
    StackTop s = work_[i];
    if (g.Scannable(s.node)) out->push_back(s);
    for (uint32_t k = g.eps_begin[s.node]; k < g.eps_begin[s.node + 1]; ++k) {
      visit(g.eps_edges[k], s.frame);
    }
    for (uint32_t k = g.ref_begin[s.node]; k < g.ref_begin[s.node + 1]; ++k) {
      const auto& r = g.ref_edges[k];
      uint32_t pushed = PushScratch(s.frame, r.dst);
      visit(r.rule_start, pushed);
    }
    if (g.final[s.node]) {
      if (s.frame == kBottomFrame) {
        *bottom_popped = true;
      } else {
        visit(FrameNode(s.frame), FrameParent(s.frame));
      }
    }
  }
}

void StackEngine::Step(std::span<const StackTop> tops, uint8_t byte, std::vector<StackTop>* out,
                       bool* bottom_popped) {
  const FlatPda& g = *flat_;
  seeds_.clear();
  for (const auto& t : tops) {
    for (uint32_t k = g.char_begin[t.node]; k < g.char_begin[t.node + 1]; ++k) {
      const auto& e = g.char_edges[k];
      if (e.bytes.Test(byte)) seeds_.push_back({e.dst, t.frame});
    }
  }
  if (seeds_.empty()) return;
  Closure(&seeds_, out, bottom_popped);
}

void PrefixWalker::Reset(std::span<const StackTop> start) {
  if (levels_.empty()) levels_.resize(1);
  levels_[0].tops.assign(start.begin(), start.end());
  levels_[0].bottom_popped = false;
  levels_[0].scratch_mark = engine_->ScratchMark();
  depth_ = 0;
}

void PrefixWalker::Walk(std::string_view token, size_t lcp) {
  if (lcp > depth_) lcp = depth_;
  engine_->ScratchTruncate(levels_[lcp].scratch_mark);
  if (levels_.size() < token.size() + 1) levels_.resize(token.size() + 1);
  for (size_t k = lcp; k < token.size(); ++k) {
    Level& next = levels_[k + 1];
    next.tops.clear();
    next.bottom_popped = false;
    next.scratch_mark = engine_->ScratchMark();
    ++bytes_examined_;
    const auto& cur = levels_[k].tops;
    if (!cur.empty()) {
      engine_->Step(cur, static_cast<uint8_t>(token[k]), &next.tops, &next.bottom_popped);
    }
    next.scratch_mark = engine_->ScratchMark();
  }
  depth_ = token.size();
}

}  // namespace gmask
