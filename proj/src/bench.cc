/*!
 *  Copyright (c) 2026 by Contributors
 * \file bench.cc
 */
#include "gmask/bench.h"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include <json.hpp>

#include "gmask/error.h"

namespace gmask {

namespace {

using Clock = std::chrono::steady_clock;

double MicrosSince(Clock::time_point t0) {
  return std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
}

constexpr int64_t kInf = std::numeric_limits<int64_t>::max() / 4;

/*! \brief Fewest bytes from each node to a final node of its rule. */
std::vector<int64_t> NodeDistances(const Pda& pda) {
  std::vector<int64_t> d(pda.num_nodes(), kInf);
  for (int32_t n = 0; n < pda.num_nodes(); ++n) {
    if (pda.node(n).final) d[n] = 0;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : pda.edges()) {
      int64_t via = d[e.dst];
      if (via >= kInf) continue;
      if (e.kind == EdgeKind::kChar) {
        via += 1;
      } else if (e.kind == EdgeKind::kRuleRef) {
        int64_t inner = d[pda.rule(e.rule_ref).start];
        if (inner >= kInf) continue;
        via += inner;
      }
      if (via < d[e.src]) {
        d[e.src] = via;
        changed = true;
      }
    }
  }
  return d;
}

int64_t StackDistance(const std::vector<int64_t>& d, const GrammarMatcher& m) {
  if (m.IsTerminated()) return -1;
  if (m.CanTerminate()) return 0;
  int64_t best = kInf;
  for (const auto& s : m.CurrentStacks()) {
    int64_t total = d[s.node];
    for (int32_t f : s.frames) total += d[f];
    best = std::min(best, total);
  }
  return best;
}

/*! \brief Shared sampling policy of the mock LLM. */
class MockSampler {
 public:
  MockSampler(const CompiledGrammar& grammar, const MockLlmOptions& options)
      : vocab_(grammar.vocab()),
        options_(options),
        dist_(NodeDistances(grammar.pda())),
        rng_(options.seed) {}

  int32_t Sample(GrammarMatcher* m, const DynamicBitset& mask, int step) {
    allowed_.clear();
    for (int i = mask.FindFirst(); i >= 0; i = mask.FindNext(i + 1)) allowed_.push_back(i);
    GMASK_CHECK(!allowed_.empty()) << "empty token mask";
    int32_t eos = vocab_.eos_id();
    if (step < options_.soft_budget) {
      return allowed_[std::uniform_int_distribution<size_t>(0, allowed_.size() - 1)(rng_)];
    }
    if (mask[eos]) return eos;
    std::stable_sort(allowed_.begin(), allowed_.end(), [&](int32_t a, int32_t b) {
      return vocab_.token(a).size() < vocab_.token(b).size();
    });
    size_t limit = std::min<size_t>(allowed_.size(), 256);
    int64_t best = kInf;
    ties_.clear();
    for (size_t k = 0; k < limit; ++k) {
      int32_t id = allowed_[k];
      if (!m->AcceptToken(id)) continue;
      int64_t dist = StackDistance(dist_, *m);
      m->Rollback(1);
      if (dist < best) {
        best = dist;
        ties_.clear();
      }
      if (dist == best) ties_.push_back(id);
    }
    GMASK_CHECK(!ties_.empty()) << "no allowed token could be accepted";
    return ties_[std::uniform_int_distribution<size_t>(0, ties_.size() - 1)(rng_)];
  }

 private:
  const Vocabulary& vocab_;
  MockLlmOptions options_;
  std::vector<int64_t> dist_;
  std::mt19937_64 rng_;
  std::vector<int32_t> allowed_;
  std::vector<int32_t> ties_;
};

struct Summary {
  double mean = 0, median = 0, p99 = 0;
};

Summary Summarize(std::vector<double> v) {
  Summary s;
  if (v.empty()) return s;
  double sum = 0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  std::sort(v.begin(), v.end());
  s.median = v[v.size() / 2];
  s.p99 = v[std::min(v.size() - 1, static_cast<size_t>(0.99 * static_cast<double>(v.size())))];
  return s;
}

}  // namespace

int64_t CompletionDistance(const GrammarMatcher& matcher) {
  return StackDistance(NodeDistances(matcher.grammar().pda()), matcher);
}

GenerationResult GenerateMock(std::shared_ptr<const CompiledGrammar> grammar,
                              const MockLlmOptions& options) {
  GenerationResult result;
  MockSampler sampler(*grammar, options);
  GrammarMatcher m(grammar);
  DynamicBitset mask;
  const Vocabulary& vocab = grammar->vocab();
  for (int step = 0; step < options.max_tokens; ++step) {
    m.FillNextTokenMask(&mask);
    int32_t id = sampler.Sample(&m, mask, step);
    GMASK_CHECK(m.AcceptToken(id)) << "masked token " << id << " was not accepted";
    result.tokens.push_back(id);
    if (id == vocab.eos_id()) {
      result.terminated = true;
      break;
    }
    result.text += vocab.token(id);
  }
  return result;
}

std::vector<BenchConfig> AblationConfigs() {
  std::vector<BenchConfig> out;
  CompileOptions o;
  o.inline_rules = false;
  o.merge_nodes = false;
  o.use_cache = false;
  o.context_expansion = false;
  out.push_back({"baseline", o});
  o.merge_nodes = true;
  out.push_back({"+merge", o});
  o.use_cache = true;
  out.push_back({"+cache", o});
  o.inline_rules = true;
  out.push_back({"+inline", o});
  o.context_expansion = true;
  out.push_back({"+ctx_expansion", o});
  return out;
}

std::vector<BenchResult> RunAblation(const std::string& grammar_text,
                                     std::shared_ptr<const Vocabulary> vocab,
                                     const std::vector<BenchConfig>& configs,
                                     const BenchOptions& options) {
  auto reference = CompiledGrammar::Compile(grammar_text, vocab);
  std::vector<std::vector<int32_t>> traces;
  for (int t = 0; t < options.num_traces; ++t) {
    MockLlmOptions llm = options.llm;
    llm.seed = options.seed + static_cast<uint64_t>(t);
    traces.push_back(GenerateMock(reference, llm).tokens);
  }
  double saved = SavedCharsRatio(reference->sorted_index());
  std::vector<BenchResult> results;
  for (const auto& cfg : configs) {
    BenchResult r;
    r.name = cfg.name;
    auto t0 = Clock::now();
    auto cg = CompiledGrammar::Compile(grammar_text, vocab, cfg.options);
    r.preprocess_s = MicrosSince(t0) / 1e6;
    r.pda_nodes = cg->pda().num_nodes();
    r.saved_chars_ratio = saved;
    if (const TokenMaskCache* cache = cg->cache()) {
      r.cache_bytes = cache->stats().serialized_bytes;
      r.all_bitset_bytes = cache->stats().all_bitset_bytes;
      r.dependent_total = cache->stats().total_dependent;
      r.dependent_unrefined = cache->stats().total_dependent_unrefined;
    }
    std::vector<double> lat;
    int total = options.warmup + options.iterations;
    int step = 0;
    DynamicBitset mask;
    while (step < total) {
      for (const auto& trace : traces) {
        GrammarMatcher m(cg);
        for (int32_t id : trace) {
          if (step >= total) break;
          auto ts = Clock::now();
          m.FillNextTokenMask(&mask);
          double us = MicrosSince(ts);
          GMASK_CHECK(mask[id]) << "replayed token " << id << " missing from mask in "
                                << cfg.name;
          if (step >= options.warmup) lat.push_back(us);
          ++step;
          GMASK_CHECK(m.AcceptToken(id)) << "replayed token " << id << " rejected";
        }
        if (step >= total) break;
      }
    }
    Summary s = Summarize(lat);
    r.mean_us = s.mean;
    r.median_us = s.median;
    r.p99_us = s.p99;
    results.push_back(r);
  }
  return results;
}

namespace {

/*! \brief A worker that computes one mask per request, used for the overlapped pipeline. */
class MaskWorker {
 public:
  MaskWorker() : thread_([this] { Loop(); }) {}
  ~MaskWorker() {
    {
      std::lock_guard<std::mutex> g(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    thread_.join();
  }
  void Start(GrammarMatcher* m, DynamicBitset* mask) {
    std::lock_guard<std::mutex> g(mu_);
    matcher_ = m;
    mask_ = mask;
    pending_ = true;
    done_ = false;
    cv_.notify_all();
  }
  void Wait() {
    std::unique_lock<std::mutex> l(mu_);
    cv_.wait(l, [&] { return done_; });
  }

 private:
  void Loop() {
    std::unique_lock<std::mutex> l(mu_);
    while (true) {
      cv_.wait(l, [&] { return pending_ || stop_; });
      if (stop_) return;
      pending_ = false;
      GrammarMatcher* m = matcher_;
      DynamicBitset* mask = mask_;
      l.unlock();
      m->FillNextTokenMask(mask);
      l.lock();
      done_ = true;
      cv_.notify_all();
    }
  }

  std::mutex mu_;
  std::condition_variable cv_;
  GrammarMatcher* matcher_ = nullptr;
  DynamicBitset* mask_ = nullptr;
  bool pending_ = false;
  bool done_ = false;
  bool stop_ = false;
  std::thread thread_;
};

struct PipelineRun {
  std::vector<int32_t> tokens;
  double mask_us = 0;
  double forward_us = 0;
  double sample_us = 0;
  double tpot_us = 0;
};

PipelineRun RunPipeline(const std::shared_ptr<const CompiledGrammar>& grammar, double forward_us,
                        int steps, uint64_t seed, bool overlap) {
  PipelineRun run;
  MockLlmOptions llm;
  llm.seed = seed;
  MockSampler sampler(*grammar, llm);
  auto m = std::make_unique<GrammarMatcher>(grammar);
  DynamicBitset mask(grammar->vocab().size());
  std::unique_ptr<MaskWorker> worker;
  if (overlap) worker = std::make_unique<MaskWorker>();
  auto forward = std::chrono::duration<double, std::micro>(forward_us);
  int gen_step = 0;
  double total = 0, mask_total = 0, fwd_total = 0, sample_total = 0;
  for (int step = 0; step < steps; ++step) {
    auto t0 = Clock::now();
    if (overlap) {
      worker->Start(m.get(), &mask);
      auto tf = Clock::now();
      std::this_thread::sleep_until(tf + std::chrono::duration_cast<Clock::duration>(forward));
      fwd_total += MicrosSince(tf);
      worker->Wait();
    } else {
      auto tm = Clock::now();
      m->FillNextTokenMask(&mask);
      mask_total += MicrosSince(tm);
      auto tf = Clock::now();
      std::this_thread::sleep_until(tf + std::chrono::duration_cast<Clock::duration>(forward));
      fwd_total += MicrosSince(tf);
    }
    auto ts = Clock::now();
    int32_t id = sampler.Sample(m.get(), mask, gen_step);
    GMASK_CHECK(m->AcceptToken(id)) << "sampled token rejected";
    sample_total += MicrosSince(ts);
    total += MicrosSince(t0);
    run.tokens.push_back(id);
    ++gen_step;
    if (m->IsTerminated()) {
      m = std::make_unique<GrammarMatcher>(grammar);
      gen_step = 0;
    }
  }
  run.mask_us = mask_total / steps;
  run.forward_us = fwd_total / steps;
  run.sample_us = sample_total / steps;
  run.tpot_us = total / steps;
  return run;
}

}  // namespace

OverlapResult RunOverlap(std::shared_ptr<const CompiledGrammar> grammar, double forward_us,
                         int steps, uint64_t seed) {
  GMASK_CHECK(steps > 0) << "steps must be positive";
  if (forward_us < 0) {
    PipelineRun probe = RunPipeline(grammar, 0, steps, seed, false);
    forward_us = 2 * probe.mask_us;
  }
  PipelineRun seq = RunPipeline(grammar, forward_us, steps, seed, false);
  PipelineRun ovl = RunPipeline(grammar, forward_us, steps, seed, true);
  OverlapResult r;
  r.mask_us = seq.mask_us;
  r.forward_us = seq.forward_us;
  r.sample_us = seq.sample_us;
  r.sequential_tpot_us = seq.tpot_us;
  r.overlapped_tpot_us = ovl.tpot_us;
  r.outputs_identical = seq.tokens == ovl.tokens;
  return r;
}

std::string BenchResultsToJson(const std::vector<BenchResult>& results,
                               const OverlapResult* overlap) {
  nlohmann::ordered_json j;
  j["configs"] = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    j["configs"].push_back({{"name", r.name},
                            {"mean_us", r.mean_us},
                            {"median_us", r.median_us},
                            {"p99_us", r.p99_us},
                            {"preprocess_s", r.preprocess_s},
                            {"pda_nodes", r.pda_nodes},
                            {"cache_bytes", r.cache_bytes},
                            {"all_bitset_bytes", r.all_bitset_bytes},
                            {"dependent_total", r.dependent_total},
                            {"dependent_unrefined", r.dependent_unrefined},
                            {"saved_chars_ratio", r.saved_chars_ratio}});
  }
  if (overlap != nullptr) {
    j["overlap"] = {{"mask_us", overlap->mask_us},
                    {"forward_us", overlap->forward_us},
                    {"sample_us", overlap->sample_us},
                    {"sequential_tpot_us", overlap->sequential_tpot_us},
                    {"overlapped_tpot_us", overlap->overlapped_tpot_us},
                    {"ratio", overlap->ratio()},
                    {"outputs_identical", overlap->outputs_identical}};
  }
  return j.dump(2);
}

}  // namespace gmask
