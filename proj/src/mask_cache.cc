/*!
 *  Copyright (c) 2026 by Contributors
 * \file mask_cache.cc
 * \brief Adaptive token mask cache: storage selection, serialization, and the sorted-vocabulary
 * preprocessing pass.
 */
#include "gmask/mask_cache.h"

#include <algorithm>
#include <chrono>
#include <deque>
#include <memory>
#include <thread>

#include "byte_io.h"
#include "gmask/error.h"
#include "stack_engine.h"

namespace gmask {

namespace {

size_t BitsetBytes(int32_t vocab_size) { return (static_cast<size_t>(vocab_size) + 7) / 8; }

// kind, num_accepted, num_rejected, ids count, dependent count.
constexpr size_t kEntryHeaderBytes = 1 + 4 + 4 + 4 + 4;

}  // namespace

const char* StorageKindName(StorageKind k) {
  switch (k) {
    case StorageKind::kAcceptHeavy:
      return "accept_heavy";
    case StorageKind::kRejectHeavy:
      return "reject_heavy";
    case StorageKind::kBitset:
      return "bitset";
  }
  return "?";
}

size_t StorageBytes(StorageKind kind, size_t accepted, size_t rejected, size_t dependent,
                    int32_t vocab_size) {
  switch (kind) {
    case StorageKind::kAcceptHeavy:
      return 4 * (rejected + dependent);
    case StorageKind::kRejectHeavy:
      return 4 * (accepted + dependent);
    case StorageKind::kBitset:
      return BitsetBytes(vocab_size) + 4 * dependent;
  }
  return 0;
}

size_t MaskCacheEntry::PayloadBytes(int32_t vocab_size) const {
  return StorageBytes(kind, num_accepted, num_rejected, dependent.size(), vocab_size);
}

size_t MaskCacheEntry::SerializedBytes(int32_t vocab_size) const {
  return kEntryHeaderBytes + PayloadBytes(vocab_size);
}

MaskCacheEntry ChooseStorage(const std::vector<int32_t>& accepted,
                             const std::vector<int32_t>& rejected,
                             const std::vector<int32_t>& dependent, int32_t vocab_size) {
  MaskCacheEntry entry;
  entry.num_accepted = static_cast<int32_t>(accepted.size());
  entry.num_rejected = static_cast<int32_t>(rejected.size());
  entry.dependent = dependent;
  StorageKind best = StorageKind::kAcceptHeavy;
  size_t best_bytes = SIZE_MAX;
  for (StorageKind k : {StorageKind::kAcceptHeavy, StorageKind::kRejectHeavy,
                        StorageKind::kBitset}) {
    size_t b = StorageBytes(k, accepted.size(), rejected.size(), dependent.size(), vocab_size);
    if (b < best_bytes) {
      best = k;
      best_bytes = b;
    }
  }
  entry.kind = best;
  if (best == StorageKind::kAcceptHeavy) {
    entry.ids = rejected;
  } else if (best == StorageKind::kRejectHeavy) {
    entry.ids = accepted;
  } else {
    entry.accept_bits = DynamicBitset(vocab_size);
    for (int32_t id : accepted) entry.accept_bits.Set(id);
  }
  return entry;
}

void MaskCacheEntry::Serialize(std::string* out) const {
  ByteWriter w(out);
  w.U8(static_cast<uint8_t>(kind));
  w.I32(num_accepted);
  w.I32(num_rejected);
  w.U32(static_cast<uint32_t>(ids.size()));
  for (int32_t id : ids) w.I32(id);
  w.U32(static_cast<uint32_t>(dependent.size()));
  for (int32_t id : dependent) w.I32(id);
  if (kind == StorageKind::kBitset) {
    size_t nbytes = BitsetBytes(accept_bits.size());
    auto words = accept_bits.words();
    for (size_t i = 0; i < nbytes; ++i) w.U8(static_cast<uint8_t>(words[i / 4] >> (8 * (i % 4))));
  }
}

MaskCacheEntry MaskCacheEntry::Deserialize(std::string_view data, size_t* pos,
                                           int32_t vocab_size) {
  ByteReader r(data, pos);
  MaskCacheEntry e;
  uint8_t kind = r.U8();
  if (kind > 2) throw Error("corrupt bundle: unknown storage kind");
  e.kind = static_cast<StorageKind>(kind);
  e.num_accepted = r.I32();
  e.num_rejected = r.I32();
  auto read_ids = [&](std::vector<int32_t>* ids) {
    uint32_t n = r.Count(4);
    ids->resize(n);
    for (uint32_t i = 0; i < n; ++i) {
      (*ids)[i] = r.I32();
      if ((*ids)[i] < 0 || (*ids)[i] >= vocab_size || (i > 0 && (*ids)[i] <= (*ids)[i - 1])) {
        throw Error("corrupt bundle: token ids out of range or unsorted");
      }
    }
  };
  read_ids(&e.ids);
  read_ids(&e.dependent);
  if (e.num_accepted < 0 || e.num_rejected < 0 ||
      static_cast<int64_t>(e.num_accepted) + e.num_rejected +
              static_cast<int64_t>(e.dependent.size()) > vocab_size) {
    throw Error("corrupt bundle: inconsistent token counts");
  }
  if (e.kind == StorageKind::kBitset) {
    if (!e.ids.empty()) throw Error("corrupt bundle: bitset entry with id list");
    e.accept_bits = DynamicBitset(vocab_size);
    size_t nbytes = BitsetBytes(vocab_size);
    auto words = e.accept_bits.mutable_words();
    for (size_t i = 0; i < nbytes; ++i) words[i / 4] |= uint32_t{r.U8()} << (8 * (i % 4));
    int tail = vocab_size % 32;
    if (tail != 0 && (words.back() >> tail) != 0) throw Error("corrupt bundle: bitset tail set");
    if (e.accept_bits.Count() != e.num_accepted) {
      throw Error("corrupt bundle: bitset count mismatch");
    }
  } else {
    int32_t expect = e.kind == StorageKind::kAcceptHeavy ? e.num_rejected : e.num_accepted;
    if (static_cast<int32_t>(e.ids.size()) != expect) {
      throw Error("corrupt bundle: id list size mismatch");
    }
  }
  return e;
}

std::vector<TokenClass> MaskCacheEntry::Decode(const Vocabulary& vocab) const {
  int32_t v = vocab.size();
  std::vector<TokenClass> cls(v, TokenClass::kRejected);
  if (kind == StorageKind::kAcceptHeavy) {
    for (int32_t i = 0; i < v; ++i) {
      if (!vocab.IsSpecial(i)) cls[i] = TokenClass::kAccepted;
    }
    for (int32_t id : ids) cls[id] = TokenClass::kRejected;
  } else if (kind == StorageKind::kRejectHeavy) {
    for (int32_t id : ids) cls[id] = TokenClass::kAccepted;
  } else {
    for (int i = accept_bits.FindFirst(); i >= 0; i = accept_bits.FindNext(i + 1)) {
      cls[i] = TokenClass::kAccepted;
    }
  }
  for (int32_t id : dependent) cls[id] = TokenClass::kDependent;
  return cls;
}

std::vector<int32_t> ReachableScannableNodes(const Pda& pda) {
  std::vector<uint8_t> seen(pda.num_nodes(), 0);
  std::deque<int32_t> queue{pda.root_start()};
  seen[pda.root_start()] = 1;
  auto visit = [&](int32_t n) {
    if (!seen[n]) {
      seen[n] = 1;
      queue.push_back(n);
    }
  };
  while (!queue.empty()) {
    int32_t u = queue.front();
    queue.pop_front();
    for (const auto& e : pda.OutEdges(u)) {
      if (e.kind == EdgeKind::kRuleRef) visit(pda.rule(e.rule_ref).start);
      visit(e.dst);
    }
  }
  std::vector<int32_t> out;
  for (int32_t n = 0; n < pda.num_nodes(); ++n) {
    if (seen[n] && pda.IsScannable(n)) out.push_back(n);
  }
  return out;
}

void TokenMaskCache::Serialize(std::string* out) const {
  ByteWriter w(out);
  w.I32(vocab_size_);
  w.U32(static_cast<uint32_t>(keys_.size()));
  for (size_t i = 0; i < keys_.size(); ++i) {
    w.I32(keys_[i]);
    entries_[i].Serialize(out);
  }
}

TokenMaskCache TokenMaskCache::Deserialize(std::string_view data, size_t* pos, int32_t num_nodes) {
  ByteReader r(data, pos);
  TokenMaskCache cache;
  cache.vocab_size_ = r.I32();
  if (cache.vocab_size_ < 0) throw Error("corrupt bundle: negative vocabulary size");
  uint32_t n = r.Count(4 + kEntryHeaderBytes);
  for (uint32_t i = 0; i < n; ++i) {
    int32_t key = r.I32();
    if (key < 0 || key >= num_nodes || (i > 0 && key <= cache.keys_.back())) {
      throw Error("corrupt bundle: cache key out of range or unsorted");
    }
    cache.keys_.push_back(key);
    cache.entries_.push_back(MaskCacheEntry::Deserialize(data, pos, cache.vocab_size_));
  }
  cache.Finish(num_nodes);
  return cache;
}

void TokenMaskCache::Finish(int32_t num_nodes) {
  index_.assign(num_nodes, -1);
  for (size_t i = 0; i < keys_.size(); ++i) index_[keys_[i]] = static_cast<int32_t>(i);
  stats_.num_entries = static_cast<int32_t>(keys_.size());
  stats_.total_accepted = stats_.total_rejected = stats_.total_dependent = 0;
  stats_.serialized_bytes = 4 + 4;
  for (const auto& e : entries_) {
    stats_.total_accepted += e.num_accepted;
    stats_.total_rejected += e.num_rejected;
    stats_.total_dependent += static_cast<int64_t>(e.dependent.size());
    stats_.serialized_bytes += 4 + e.SerializedBytes(vocab_size_);
  }
  stats_.all_bitset_bytes = keys_.size() * BitsetBytes(vocab_size_);
}

namespace {

struct EntryResult {
  MaskCacheEntry entry;
  int64_t bytes_examined = 0;
  int64_t dependent_unrefined = 0;
};

EntryResult BuildEntry(const Pda& pda, const ContextExpansion* ctx, StackEngine* engine,
                       const Vocabulary& vocab, const SortedVocabIndex& index, int32_t node) {
  PrefixWalker walker(engine);
  StackTop start{node, kBottomFrame};
  walker.Reset(std::span<const StackTop>(&start, 1));
  std::vector<int32_t> accepted, rejected, dependent;
  std::vector<TokenClass> cls(vocab.size(), TokenClass::kRejected);
  EntryResult res;
  ClassifyResult cr;
  bool outermost = IsOutermostNode(pda, node);
  for (size_t k = 0; k < index.order.size(); ++k) {
    int32_t id = index.order[k];
    const std::string& tok = vocab.token(id);
    walker.Walk(tok, index.lcp[k]);
    if (walker.AcceptedAt(tok.size())) {
      cls[id] = TokenClass::kAccepted;
      continue;
    }
    if (outermost) continue;
    cr.pop_offsets.clear();
    for (size_t j = 1; j < tok.size(); ++j) {
      if (walker.bottom_popped(j)) cr.pop_offsets.push_back(static_cast<int32_t>(j));
    }
    if (cr.pop_offsets.empty()) continue;
    ++res.dependent_unrefined;
    cr.cls = TokenClass::kDependent;
    cls[id] = ctx != nullptr ? RefineDependent(pda, *ctx, node, tok, cr) : TokenClass::kDependent;
  }
  res.bytes_examined = static_cast<int64_t>(walker.bytes_examined());
  for (int32_t id = 0; id < vocab.size(); ++id) {
    if (vocab.IsSpecial(id)) continue;
    switch (cls[id]) {
      case TokenClass::kAccepted:
        accepted.push_back(id);
        break;
      case TokenClass::kRejected:
        rejected.push_back(id);
        break;
      case TokenClass::kDependent:
        dependent.push_back(id);
        break;
    }
  }
  res.entry = ChooseStorage(accepted, rejected, dependent, vocab.size());
  return res;
}

}  // namespace

TokenMaskCache BuildMaskCache(const Pda& pda, const Vocabulary& vocab,
                              const SortedVocabIndex& index, const MaskCacheOptions& options) {
  auto t0 = std::chrono::steady_clock::now();
  TokenMaskCache cache;
  cache.vocab_size_ = vocab.size();
  cache.keys_ = ReachableScannableNodes(pda);
  std::unique_ptr<ContextExpansion> ctx;
  if (options.context_expansion) ctx = std::make_unique<ContextExpansion>(pda);
  auto flat = std::make_shared<const FlatPda>(pda);
  std::vector<EntryResult> results(cache.keys_.size());
  int threads = std::max(1, std::min<int>(options.num_threads, cache.keys_.size()));
  auto work = [&](int t) {
    StackEngine engine(flat, nullptr);
    for (size_t i = t; i < cache.keys_.size(); i += threads) {
      engine.ScratchTruncate(0);
      results[i] = BuildEntry(pda, ctx.get(), &engine, vocab, index, cache.keys_[i]);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  int64_t unrefined = 0, examined = 0;
  for (auto& r : results) {
    cache.entries_.push_back(std::move(r.entry));
    cache.bytes_examined_.push_back(r.bytes_examined);
    unrefined += r.dependent_unrefined;
    examined += r.bytes_examined;
  }
  cache.Finish(pda.num_nodes());
  cache.stats_.total_dependent_unrefined = unrefined;
  cache.stats_.bytes_examined = examined;
  cache.stats_.build_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return cache;
}

}  // namespace gmask
