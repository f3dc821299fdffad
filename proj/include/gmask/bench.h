/*!
 *  Copyright (c) 2026 by Contributors
 * \file gmask/bench.h
 * \brief Mock-LLM constrained generation and the mask latency benchmark.
 */
#ifndef GMASK_BENCH_H_
#define GMASK_BENCH_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gmask/compiled_grammar.h"
#include "gmask/matcher.h"

namespace gmask {

struct MockLlmOptions {
  uint64_t seed = 0;
  /*! \brief Hard cap on generated tokens, EOS included. */
  int max_tokens = 512;
  /*! \brief After this many tokens the sampler steers toward the shortest completion. */
  int soft_budget = 48;
};

struct GenerationResult {
  std::vector<int32_t> tokens;
  /*! \brief Bytes of the non-EOS tokens. */
  std::string text;
  bool terminated = false;
};

/*!
 * \brief Samples uniformly among the tokens allowed by each mask until EOS. Once the soft budget
 * is spent it picks EOS when allowed, otherwise an allowed token that brings the state closest to
 * a legal end, so generation finishes for recursive grammars.
 */
GenerationResult GenerateMock(std::shared_ptr<const CompiledGrammar> grammar,
                              const MockLlmOptions& options);

/*!
 * \brief Fewest bytes needed to finish the root rule from the matcher's current stacks, or -1
 * when the matcher is terminated.
 */
int64_t CompletionDistance(const GrammarMatcher& matcher);

struct BenchConfig {
  std::string name;
  CompileOptions options;
};

/*! \brief The cumulative ablation ladder: baseline, +merge, +cache, +inline, +ctx_expansion. */
std::vector<BenchConfig> AblationConfigs();

struct BenchOptions {
  /*! \brief Measured mask computations per configuration. */
  int iterations = 400;
  int warmup = 100;
  uint64_t seed = 1;
  /*! \brief Generation traces recorded and replayed. */
  int num_traces = 8;
  MockLlmOptions llm;
};

struct BenchResult {
  std::string name;
  double mean_us = 0;
  double median_us = 0;
  double p99_us = 0;
  double preprocess_s = 0;
  size_t cache_bytes = 0;
  size_t all_bitset_bytes = 0;
  int64_t dependent_total = 0;
  int64_t dependent_unrefined = 0;
  double saved_chars_ratio = 0;
  int32_t pda_nodes = 0;
};

/*!
 * \brief Records generation traces with a fully optimized build, then for each configuration
 * replays them, timing FillNextTokenMask before every accepted token.
 */
std::vector<BenchResult> RunAblation(const std::string& grammar_text,
                                     std::shared_ptr<const Vocabulary> vocab,
                                     const std::vector<BenchConfig>& configs,
                                     const BenchOptions& options);

struct OverlapResult {
  double mask_us = 0;
  double forward_us = 0;
  double sample_us = 0;
  /*! \brief mask, then forward, then sampling, one after the other. */
  double sequential_tpot_us = 0;
  /*! \brief mask on a worker thread while the forward pass runs; both joined before sampling. */
  double overlapped_tpot_us = 0;
  double ratio() const { return overlapped_tpot_us / sequential_tpot_us; }
  /*! \brief Token sequences of the two modes were identical. */
  bool outputs_identical = false;
};

/*!
 * \brief Runs the same seeded generation twice, sequentially and overlapped, with a simulated
 * forward pass of `forward_us` microseconds (slept). A negative value means twice the measured
 * mean mask latency.
 */
OverlapResult RunOverlap(std::shared_ptr<const CompiledGrammar> grammar, double forward_us,
                         int steps, uint64_t seed);

std::string BenchResultsToJson(const std::vector<BenchResult>& results,
                               const OverlapResult* overlap);

}  // namespace gmask

#endif  // GMASK_BENCH_H_
