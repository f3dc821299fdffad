/*!
 *  Copyright (c) 2026 by Contributors
 * \file compiled_grammar.cc
 */
#include "gmask/compiled_grammar.h"

#include <fstream>
#include <sstream>

#include "byte_io.h"
#include "gmask/error.h"
#include "stack_engine.h"

namespace gmask {

namespace {

constexpr char kMagic[4] = {'G', 'M', 'C', '1'};

enum BundleFlags : uint32_t {
  kFlagInline = 1u << 0,
  kFlagMerge = 1u << 1,
  kFlagCache = 1u << 2,
  kFlagContext = 1u << 3,
};

std::string HexHash(uint64_t h) {
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace

std::shared_ptr<const CompiledGrammar> CompiledGrammar::Compile(
    const Grammar& grammar, std::shared_ptr<const Vocabulary> vocab,
    const CompileOptions& options) {
  GMASK_CHECK(vocab != nullptr) << "vocabulary required";
  std::shared_ptr<CompiledGrammar> cg(new CompiledGrammar());
  cg->grammar_text_ = PrintGrammar(grammar);
  PdaOptions pda_options;
  pda_options.inline_rules = options.inline_rules;
  pda_options.merge_nodes = options.merge_nodes;
  cg->pda_ = CompilePda(grammar, pda_options);
  cg->vocab_ = std::move(vocab);
  cg->options_ = options;
  if (!options.use_cache) cg->options_.context_expansion = false;
  cg->index_ = BuildSortedIndex(*cg->vocab_);
  if (options.use_cache) {
    MaskCacheOptions mc;
    mc.context_expansion = cg->options_.context_expansion;
    mc.num_threads = options.num_threads;
    cg->cache_ = BuildMaskCache(cg->pda_, *cg->vocab_, cg->index_, mc);
  }
  cg->Finish();
  return cg;
}

std::shared_ptr<const CompiledGrammar> CompiledGrammar::Compile(
    std::string_view grammar_text, std::shared_ptr<const Vocabulary> vocab,
    const CompileOptions& options) {
  return Compile(ParseGrammar(grammar_text), std::move(vocab), options);
}

void CompiledGrammar::Finish() {
  flat_ = std::make_shared<const FlatPda>(pda_);
  rank_.assign(vocab_->size(), -1);
  for (size_t k = 0; k < index_.order.size(); ++k) rank_[index_.order[k]] = static_cast<int32_t>(k);
}

std::string CompiledGrammar::Serialize() const {
  std::string out;
  out.append(kMagic, 4);
  ByteWriter w(&out);
  w.U32(kBundleVersion);
  uint32_t flags = 0;
  if (options_.inline_rules) flags |= kFlagInline;
  if (options_.merge_nodes) flags |= kFlagMerge;
  if (cache_) flags |= kFlagCache;
  if (options_.context_expansion) flags |= kFlagContext;
  w.U32(flags);
  w.U64(vocab_->Hash());
  w.I32(vocab_->size());
  w.Bytes(grammar_text_);
  pda_.Serialize(&out);
  if (cache_) cache_->Serialize(&out);
  return out;
}

std::shared_ptr<const CompiledGrammar> CompiledGrammar::Deserialize(
    std::string_view data, std::shared_ptr<const Vocabulary> vocab) {
  GMASK_CHECK(vocab != nullptr) << "vocabulary required";
  if (data.size() < 4 || data.substr(0, 4) != std::string_view(kMagic, 4)) {
    throw Error("not a grammar bundle (bad magic)");
  }
  size_t pos = 4;
  ByteReader r(data, &pos);
  uint32_t version = r.U32();
  if (version != kBundleVersion) {
    throw Error("unsupported bundle version " + std::to_string(version));
  }
  uint32_t flags = r.U32();
  if (flags & ~uint32_t{kFlagInline | kFlagMerge | kFlagCache | kFlagContext}) {
    throw Error("corrupt bundle: unknown flags");
  }
  uint64_t hash = r.U64();
  int32_t vocab_size = r.I32();
  if (hash != vocab->Hash() || vocab_size != vocab->size()) {
    throw VocabMismatchError("bundle was compiled for vocabulary hash " + HexHash(hash) +
                             " (size " + std::to_string(vocab_size) +
                             "), but the given vocabulary has hash " + HexHash(vocab->Hash()) +
                             " (size " + std::to_string(vocab->size()) + ")");
  }
  std::shared_ptr<CompiledGrammar> cg(new CompiledGrammar());
  cg->grammar_text_ = r.Bytes();
  cg->pda_ = Pda::Deserialize(data, &pos);
  cg->vocab_ = std::move(vocab);
  cg->options_.inline_rules = flags & kFlagInline;
  cg->options_.merge_nodes = flags & kFlagMerge;
  cg->options_.use_cache = flags & kFlagCache;
  cg->options_.context_expansion = flags & kFlagContext;
  if (cg->options_.use_cache) {
    cg->cache_ = TokenMaskCache::Deserialize(data, &pos, cg->pda_.num_nodes());
    if (cg->cache_->vocab_size() != vocab_size) {
      throw Error("corrupt bundle: cache vocabulary size mismatch");
    }
    for (int32_t key : ReachableScannableNodes(cg->pda_)) {
      if (cg->cache_->Find(key) == nullptr) throw Error("corrupt bundle: cache entry missing");
    }
  }
  if (pos != data.size()) throw Error("corrupt bundle: trailing bytes");
  cg->index_ = BuildSortedIndex(*cg->vocab_);
  cg->Finish();
  return cg;
}

void CompiledGrammar::Save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  std::string data = Serialize();
  f.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!f) throw Error("failed to write '" + path + "'");
}

std::shared_ptr<const CompiledGrammar> CompiledGrammar::Load(
    const std::string& path, std::shared_ptr<const Vocabulary> vocab) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return Deserialize(ss.str(), std::move(vocab));
}

}  // namespace gmask
