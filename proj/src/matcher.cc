/*!
 *  Copyright (c) 2026 by Contributors
 * \file matcher.cc
 */
#include "gmask/matcher.h"

#include <algorithm>
#include <bit>
#include <deque>
#include <unordered_map>

#include "gmask/error.h"
#include "stack_engine.h"

namespace gmask {

namespace {

struct State {
  /*! \brief Sorted, unique; each frame handle holds one arena reference. */
  std::vector<StackTop> tops;
  bool can_terminate = false;
  bool terminated = false;
};

size_t CommonPrefix(const std::string& a, const std::string& b) {
  size_t n = std::min(a.size(), b.size());
  size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return i;
}

}  // namespace

struct GrammarMatcher::Impl {
  Impl(std::shared_ptr<const CompiledGrammar> g, std::shared_ptr<PersistentStackTree> a,
       int window)
      : cg(std::move(g)),
        arena(std::move(a)),
        engine(cg->flat(), arena.get()),
        walker(&engine),
        history_window(window) {}

  ~Impl() {
    auto guard = arena->lock();
    ReleaseLocked(state);
    for (auto& s : history) ReleaseLocked(s);
  }

  void RetainLocked(const State& s) {
    for (const auto& t : s.tops) arena->RetainLocked(t.frame);
  }
  void ReleaseLocked(const State& s) {
    for (const auto& t : s.tops) arena->ReleaseLocked(t.frame);
  }
  State Copy(const State& s) {
    auto guard = arena->lock();
    RetainLocked(s);
    return s;
  }

  /*! \brief Replace scratch frames with arena frames; the result owns one reference per top. */
  std::vector<StackTop> Materialize(const std::vector<StackTop>& tops) {
    auto guard = arena->lock();
    std::unordered_map<uint32_t, uint32_t> memo;
    std::vector<uint32_t> chain;
    auto resolve = [&](uint32_t ref) -> uint32_t {
      chain.clear();
      uint32_t r = ref;
      while (StackEngine::IsScratch(r) && !memo.count(r)) {
        chain.push_back(r);
        r = engine.FrameParent(r);
      }
      uint32_t h = StackEngine::IsScratch(r) ? memo[r] : r;
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        h = arena->PushLocked(h, engine.FrameNode(*it));
        memo.emplace(*it, h);
      }
      return h;
    };
    std::vector<StackTop> out;
    out.reserve(tops.size());
    for (const auto& t : tops) {
      uint32_t h = resolve(t.frame);
      arena->RetainLocked(h);
      out.push_back({t.node, h});
    }
    for (const auto& [ref, h] : memo) arena->ReleaseLocked(h);
    std::sort(out.begin(), out.end());
    size_t w = 0;
    for (size_t i = 0; i < out.size(); ++i) {
      if (w > 0 && out[i] == out[w - 1]) {
        arena->ReleaseLocked(out[i].frame);
      } else {
        out[w++] = out[i];
      }
    }
    out.resize(w);
    return out;
  }

  /*! \brief Step `bytes` from `start`; true when some stack survives or the root can finish. */
  bool Run(const std::vector<StackTop>& start, std::string_view bytes,
           std::vector<StackTop>* result, bool* popped) {
    cur = start;
    *popped = false;
    for (char ch : bytes) {
      if (cur.empty()) return false;
      next.clear();
      *popped = false;
      engine.Step(cur, static_cast<uint8_t>(ch), &next, popped);
      cur.swap(next);
    }
    if (cur.empty() && !*popped) return false;
    *result = cur;
    return true;
  }

  void PushHistory(State old) {
    history.push_back(std::move(old));
    if (static_cast<int>(history.size()) > history_window) {
      auto guard = arena->lock();
      ReleaseLocked(history.front());
      history.pop_front();
    }
  }

  void Initialize() {
    std::vector<StackTop> seeds{{cg->pda().root_start(), kBottomFrame}};
    std::vector<StackTop> tops;
    bool popped = false;
    engine.Closure(&seeds, &tops, &popped);
    state.tops = Materialize(tops);
    state.can_terminate = popped;
    engine.ScratchTruncate(0);
  }

  bool AcceptBytes(std::string_view bytes) {
    if (state.terminated) return false;
    if (bytes.empty()) {
      PushHistory(Copy(state));
      return true;
    }
    std::vector<StackTop> tops;
    bool popped = false;
    bool ok = Run(state.tops, bytes, &tops, &popped);
    if (ok) {
      State fresh;
      fresh.tops = Materialize(tops);
      fresh.can_terminate = popped;
      PushHistory(std::move(state));
      state = std::move(fresh);
    }
    engine.ScratchTruncate(0);
    return ok;
  }

  /*! \brief For one stack, mark which dependent tokens (given in check order) it accepts. */
  void CheckDependents(const StackTop& top, const std::vector<int32_t>& ids,
                       const std::vector<int32_t>& lcp, std::vector<uint8_t>* ok) {
    const Vocabulary& vocab = cg->vocab();
    walker.Reset(std::span<const StackTop>(&top, 1));
    ok->assign(ids.size(), 0);
    for (size_t k = 0; k < ids.size(); ++k) {
      const std::string& tok = vocab.token(ids[k]);
      walker.Walk(tok, lcp.empty() ? 0 : lcp[k]);
      (*ok)[k] = walker.AcceptedAt(tok.size()) ? 1 : 0;
    }
    stats.tokens_checked += static_cast<int64_t>(ids.size());
  }

  void FillWithoutCache(DynamicBitset* mask) {
    const Vocabulary& vocab = cg->vocab();
    const SortedVocabIndex& index = cg->sorted_index();
    for (int32_t id : index.order) {
      const std::string& tok = vocab.token(id);
      std::vector<StackTop> tops;
      bool popped = false;
      if (Run(state.tops, tok, &tops, &popped)) mask->Set(id);
      ++stats.tokens_checked;
    }
  }

  void FillWithCache(DynamicBitset* mask) {
    const TokenMaskCache& cache = *cg->cache();
    const Vocabulary& vocab = cg->vocab();
    const std::vector<int32_t>& rank = cg->sorted_rank();
    int32_t vsize = vocab.size();
    if (partial_acc.size() != vsize) partial_acc = DynamicBitset(vsize);
    partial_acc.ResetAll();
    bool have_rej = false;
    partial_rej.clear();
    std::vector<int32_t> order, lcp, rej_i, merged;
    std::vector<uint8_t> ok;
    const auto& tops = state.tops;
    for (size_t g = 0; g < tops.size();) {
      size_t g_end = g;
      while (g_end < tops.size() && tops[g_end].node == tops[g].node) ++g_end;
      const MaskCacheEntry* e = cache.Find(tops[g].node);
      GMASK_CHECK(e != nullptr) << "no cache entry for stack top node " << tops[g].node;
      ++stats.num_lookups;
      order = e->dependent;
      lcp.clear();
      if (order.size() > kSortedCheckThreshold) {
        std::sort(order.begin(), order.end(),
                  [&](int32_t a, int32_t b) { return rank[a] < rank[b]; });
        lcp.resize(order.size(), 0);
        for (size_t k = 1; k < order.size(); ++k) {
          lcp[k] = static_cast<int32_t>(CommonPrefix(vocab.token(order[k - 1]),
                                                     vocab.token(order[k])));
        }
      }
      // Without dependent tokens every stack with this top contributes the same sets.
      size_t stacks = order.empty() ? 1 : g_end - g;
      for (size_t s = 0; s < stacks; ++s) {
        if (!order.empty()) CheckDependents(tops[g + s], order, lcp, &ok);
        if (e->kind == StorageKind::kAcceptHeavy) {
          rej_i = e->ids;
          for (size_t k = 0; k < order.size(); ++k) {
            if (!ok[k]) rej_i.push_back(order[k]);
          }
          std::sort(rej_i.begin(), rej_i.end());
          if (!have_rej) {
            partial_rej.swap(rej_i);
            have_rej = true;
          } else {
            merged.clear();
            std::set_intersection(partial_rej.begin(), partial_rej.end(), rej_i.begin(),
                                  rej_i.end(), std::back_inserter(merged));
            partial_rej.swap(merged);
          }
        } else {
          if (e->kind == StorageKind::kRejectHeavy) {
            for (int32_t id : e->ids) partial_acc.Set(id);
          } else {
            partial_acc |= e->accept_bits;
          }
          for (size_t k = 0; k < order.size(); ++k) {
            if (ok[k]) partial_acc.Set(order[k]);
          }
        }
      }
      g = g_end;
    }
    if (have_rej) {
      mask->SetAll();
      for (int32_t id : vocab.special_ids()) mask->Reset(id);
      for (int32_t id : partial_rej) {
        if (!partial_acc[id]) mask->Reset(id);
      }
    } else {
      *mask = partial_acc;
    }
  }

  void FillNextTokenMask(DynamicBitset* mask) {
    int32_t vsize = cg->vocab().size();
    if (mask->size() != vsize) *mask = DynamicBitset(vsize);
    mask->ResetAll();
    stats = MaskFillStats();
    if (state.terminated) return;
    stats.num_tops = static_cast<int32_t>(state.tops.size());
    if (cg->cache() != nullptr) {
      FillWithCache(mask);
    } else {
      FillWithoutCache(mask);
    }
    if (state.can_terminate) mask->Set(cg->vocab().eos_id());
    engine.ScratchTruncate(0);
  }

  std::string FindJumpForwardBytes() {
    std::string out;
    if (state.terminated) return out;
    const FlatPda& g = engine.flat();
    cur = state.tops;
    bool can_terminate = state.can_terminate;
    while (!can_terminate && out.size() < kMaxJumpForwardBytes && !cur.empty()) {
      ByteSet all;
      for (const auto& t : cur) {
        for (uint32_t k = g.char_begin[t.node]; k < g.char_begin[t.node + 1]; ++k) {
          for (int w = 0; w < 4; ++w) all.words[w] |= g.char_edges[k].bytes.words[w];
        }
      }
      int count = 0, byte = -1;
      for (int w = 0; w < 4; ++w) {
        count += std::popcount(all.words[w]);
        if (all.words[w] != 0 && byte < 0) byte = w * 64 + std::countr_zero(all.words[w]);
      }
      if (count != 1) break;
      next.clear();
      bool popped = false;
      engine.Step(cur, static_cast<uint8_t>(byte), &next, &popped);
      cur.swap(next);
      can_terminate = popped;
      out.push_back(static_cast<char>(byte));
    }
    engine.ScratchTruncate(0);
    return out;
  }

  std::shared_ptr<const CompiledGrammar> cg;
  std::shared_ptr<PersistentStackTree> arena;
  StackEngine engine;
  PrefixWalker walker;
  int history_window;
  State state;
  std::deque<State> history;
  MaskFillStats stats;
  std::vector<StackTop> cur, next;
  DynamicBitset partial_acc;
  std::vector<int32_t> partial_rej;
};

GrammarMatcher::GrammarMatcher(std::shared_ptr<const CompiledGrammar> grammar,
                               int history_window) {
  GMASK_CHECK(grammar != nullptr) << "compiled grammar required";
  GMASK_CHECK(history_window >= 0) << "history window must be non-negative";
  impl_ = std::make_unique<Impl>(std::move(grammar), std::make_shared<PersistentStackTree>(),
                                 history_window);
  impl_->Initialize();
}

GrammarMatcher::GrammarMatcher(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
GrammarMatcher::~GrammarMatcher() = default;
GrammarMatcher::GrammarMatcher(GrammarMatcher&&) noexcept = default;
GrammarMatcher& GrammarMatcher::operator=(GrammarMatcher&&) noexcept = default;

bool GrammarMatcher::AcceptToken(int32_t token_id) {
  const Vocabulary& vocab = impl_->cg->vocab();
  GMASK_CHECK(token_id >= 0 && token_id < vocab.size())
      << "token id " << token_id << " out of range [0, " << vocab.size() << ")";
  State& s = impl_->state;
  if (s.terminated) return false;
  if (token_id == vocab.eos_id()) {
    if (!s.can_terminate) return false;
    State done = impl_->Copy(s);
    done.terminated = true;
    impl_->PushHistory(std::move(s));
    s = std::move(done);
    return true;
  }
  if (vocab.IsSpecial(token_id) || vocab.token(token_id).empty()) return false;
  return impl_->AcceptBytes(vocab.token(token_id));
}

bool GrammarMatcher::AcceptBytes(std::string_view bytes) { return impl_->AcceptBytes(bytes); }

void GrammarMatcher::Rollback(int steps) {
  GMASK_CHECK(steps >= 0 && steps <= static_cast<int>(impl_->history.size()))
      << "cannot roll back " << steps << " steps; history holds "
      << impl_->history.size();
  auto guard = impl_->arena->lock();
  for (int i = 0; i < steps; ++i) {
    impl_->ReleaseLocked(impl_->state);
    impl_->state = std::move(impl_->history.back());
    impl_->history.pop_back();
  }
}

GrammarMatcher GrammarMatcher::Branch() const {
  auto impl = std::make_unique<Impl>(impl_->cg, impl_->arena, impl_->history_window);
  impl->state = impl_->Copy(impl_->state);
  for (const auto& s : impl_->history) impl->history.push_back(impl_->Copy(s));
  return GrammarMatcher(std::move(impl));
}

void GrammarMatcher::FillNextTokenMask(DynamicBitset* mask) { impl_->FillNextTokenMask(mask); }

DynamicBitset GrammarMatcher::GetNextTokenMask() {
  DynamicBitset mask(impl_->cg->vocab().size());
  impl_->FillNextTokenMask(&mask);
  return mask;
}

const MaskFillStats& GrammarMatcher::last_fill_stats() const { return impl_->stats; }

std::string GrammarMatcher::FindJumpForwardBytes() { return impl_->FindJumpForwardBytes(); }

bool GrammarMatcher::CanTerminate() const {
  return impl_->state.can_terminate && !impl_->state.terminated;
}
bool GrammarMatcher::IsTerminated() const { return impl_->state.terminated; }
int GrammarMatcher::history_size() const { return static_cast<int>(impl_->history.size()); }
int GrammarMatcher::history_window() const { return impl_->history_window; }
int32_t GrammarMatcher::num_tops() const {
  return static_cast<int32_t>(impl_->state.tops.size());
}

std::vector<OracleStack> GrammarMatcher::CurrentStacks() const {
  std::vector<OracleStack> out;
  for (const auto& t : impl_->state.tops) {
    OracleStack s{t.node, {}};
    for (uint32_t f = t.frame; f != kBottomFrame; f = impl_->arena->Parent(f)) {
      s.frames.push_back(impl_->arena->Node(f));
    }
    std::reverse(s.frames.begin(), s.frames.end());
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

const CompiledGrammar& GrammarMatcher::grammar() const { return *impl_->cg; }
const std::shared_ptr<PersistentStackTree>& GrammarMatcher::arena() const {
  return impl_->arena;
}

}  // namespace gmask
