/*!
 *  Copyright (c) 2026 by Contributors
 * \file gmask_cli.cc
 * \brief Command line front end: compile bundles, check inputs, print masks, generate, benchmark.
 *
 * Exit codes: 0 success, 1 input rejected or generation did not finish, 2 usage error,
 * 3 runtime error (bad grammar, schema, vocabulary, bundle, or I/O).
 */
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gmask/bench.h"
#include "gmask/builtin_grammars.h"
#include "gmask/compiled_grammar.h"
#include "gmask/error.h"
#include "gmask/json_schema.h"
#include "gmask/matcher.h"
#include "gmask/pda.h"
#include "gmask/vocabulary.h"

namespace {

using namespace gmask;

constexpr int kExitRejected = 1;
constexpr int kExitError = 3;

std::string ReadFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f.write(data.data(), static_cast<std::streamsize>(data.size()));
}

/*! \brief `builtin:NAME`, `schema:PATH`, or a grammar file path. */
std::string GrammarText(const std::string& spec) {
  if (spec.rfind("builtin:", 0) == 0) return builtin::BuiltinGrammarText(spec.substr(8));
  if (spec.rfind("schema:", 0) == 0) return SchemaToGrammarText(ReadFile(spec.substr(7)));
  return ReadFile(spec);
}

/*! \brief `synthetic`, `synthetic:SIZE`, `toy`, or a vocabulary JSON path. */
std::shared_ptr<const Vocabulary> LoadVocab(const std::string& spec) {
  if (spec == "toy") return std::make_shared<const Vocabulary>(ToyVocabulary());
  if (spec == "synthetic") return std::make_shared<const Vocabulary>(SyntheticVocabulary());
  if (spec.rfind("synthetic:", 0) == 0) {
    return std::make_shared<const Vocabulary>(SyntheticVocabulary(std::stoi(spec.substr(10))));
  }
  return std::make_shared<const Vocabulary>(Vocabulary::Load(spec));
}

std::string MaskHex(const DynamicBitset& mask) {
  std::string out;
  char buf[16];
  for (uint32_t w : mask.words()) {
    std::snprintf(buf, sizeof(buf), "%08x", w);
    if (!out.empty()) out += ' ';
    out += buf;
  }
  return out;
}

std::string Printable(std::string_view bytes) {
  std::string out;
  char buf[8];
  for (unsigned char c : bytes) {
    if (c >= 0x20 && c < 0x7F && c != '\\') {
      out += static_cast<char>(c);
    } else {
      std::snprintf(buf, sizeof(buf), "\\x%02X", c);
      out += buf;
    }
  }
  return out;
}

struct ToggleFlags {
  bool no_inline = false;
  bool no_merge = false;
  bool no_cache = false;
  bool no_ctx = false;
  int threads = 1;

  void Add(CLI::App* app) {
    app->add_flag("--no-inline", no_inline, "Disable rule inlining");
    app->add_flag("--no-merge", no_merge, "Disable node merging");
    app->add_flag("--no-cache", no_cache, "Build without the token mask cache");
    app->add_flag("--no-ctx", no_ctx, "Disable context expansion");
    app->add_option("--threads", threads, "Cache build threads")->check(CLI::PositiveNumber);
  }
  CompileOptions Options() const {
    CompileOptions o;
    o.inline_rules = !no_inline;
    o.merge_nodes = !no_merge;
    o.use_cache = !no_cache;
    o.context_expansion = !no_ctx && !no_cache;
    o.num_threads = threads;
    return o;
  }
};

void PrintStats(const CompiledGrammar& cg) {
  PdaStats ps = cg.pda().Stats();
  std::cout << "pda: " << ps.num_nodes << " nodes, " << ps.num_char_edges << " char edges, "
            << ps.num_ref_edges << " rule edges, " << ps.num_epsilon_edges << " epsilon edges, "
            << cg.pda().num_rules() << " rules\n";
  const TokenMaskCache* cache = cg.cache();
  if (cache == nullptr) {
    std::cout << "cache: disabled\n";
    return;
  }
  const MaskCacheStats& s = cache->stats();
  std::cout << "cache: " << s.num_entries << " entries, " << s.serialized_bytes
            << " bytes (all-bitset " << s.all_bitset_bytes << "), dependent " << s.total_dependent
            << " (before context expansion " << s.total_dependent_unrefined << ")\n";
  std::cout << "node\trule\tstorage\taccepted\trejected\tdependent\tbytes\n";
  for (size_t i = 0; i < cache->keys().size(); ++i) {
    int32_t node = cache->keys()[i];
    const MaskCacheEntry& e = cache->entries()[i];
    std::cout << node << '\t' << cg.pda().rule(cg.pda().node(node).rule).name << '\t'
              << StorageKindName(e.kind) << '\t' << e.num_accepted << '\t' << e.num_rejected
              << '\t' << e.dependent.size() << '\t' << e.SerializedBytes(cg.vocab().size())
              << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gmask: grammar-constrained token masks"};
  app.require_subcommand(1);

  // compile
  auto* compile = app.add_subcommand("compile", "Compile a grammar against a vocabulary");
  std::string c_grammar, c_vocab, c_out;
  bool c_stats = false;
  ToggleFlags c_flags;
  compile->add_option("grammar", c_grammar, "Grammar file, builtin:NAME or schema:PATH")
      ->required();
  compile->add_option("--vocab", c_vocab, "Vocabulary JSON, toy, or synthetic[:SIZE]")
      ->required();
  compile->add_option("-o,--output", c_out, "Bundle output path");
  compile->add_flag("--stats", c_stats, "Print PDA and per-entry cache statistics");
  c_flags.Add(compile);

  // check
  auto* check = app.add_subcommand("check", "Check whether a file matches a grammar");
  std::string k_grammar, k_input;
  check->add_option("grammar", k_grammar, "Grammar file, builtin:NAME or schema:PATH")
      ->required();
  check->add_option("input", k_input, "Input file")->required();

  // mask
  auto* mask_cmd = app.add_subcommand("mask", "Print the next-token mask after a prefix");
  std::string m_bundle, m_vocab, m_prefix;
  std::vector<int32_t> m_tokens;
  bool m_ids = false;
  mask_cmd->add_option("bundle", m_bundle, "Bundle path")->required();
  mask_cmd->add_option("--vocab", m_vocab, "Vocabulary")->required();
  mask_cmd->add_option("--prefix", m_prefix, "Bytes accepted before the mask");
  mask_cmd->add_option("--tokens", m_tokens, "Token ids accepted before the mask");
  mask_cmd->add_flag("--ids", m_ids, "Print allowed token ids instead of hex words");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate with a uniform mock LLM under the grammar");
  std::string g_bundle, g_vocab;
  MockLlmOptions g_llm;
  gen->add_option("bundle", g_bundle, "Bundle path")->required();
  gen->add_option("--vocab", g_vocab, "Vocabulary")->required();
  gen->add_option("--seed", g_llm.seed, "Sampler seed");
  gen->add_option("--max-tokens", g_llm.max_tokens, "Token cap")->check(CLI::PositiveNumber);
  gen->add_option("--soft-budget", g_llm.soft_budget, "Tokens before steering to an end");

  // bench
  auto* bench = app.add_subcommand("bench", "Ablation benchmark of mask latency");
  std::string b_grammar, b_vocab;
  BenchOptions b_opts;
  bool b_json = false, b_overlap = false;
  double b_forward = -1;
  int b_overlap_steps = 200;
  bench->add_option("grammar", b_grammar, "Grammar file, builtin:NAME or schema:PATH")
      ->required();
  bench->add_option("--vocab", b_vocab, "Vocabulary")->default_val("synthetic");
  bench->add_option("--iterations", b_opts.iterations, "Measured steps per configuration");
  bench->add_option("--warmup", b_opts.warmup, "Unmeasured steps per configuration");
  bench->add_option("--traces", b_opts.num_traces, "Generation traces to replay");
  bench->add_option("--seed", b_opts.seed, "Trace seed");
  bench->add_flag("--overlap", b_overlap, "Also simulate mask/forward overlap");
  bench->add_option("--forward-us", b_forward,
                    "Simulated forward latency; default twice the mask latency");
  bench->add_option("--overlap-steps", b_overlap_steps, "Steps of the overlap simulation");
  bench->add_flag("--json", b_json, "JSON report");

  // schema compile
  auto* schema = app.add_subcommand("schema", "JSON Schema tools");
  schema->require_subcommand(1);
  auto* schema_compile = schema->add_subcommand("compile", "Convert a JSON Schema to a grammar");
  std::string s_in, s_out;
  bool s_strict = false;
  schema_compile->add_option("schema", s_in, "Schema JSON file")->required();
  schema_compile->add_option("-o,--output", s_out, "Grammar output path");
  schema_compile->add_flag("--strict-whitespace", s_strict, "No whitespace between tokens");

  // pda dump
  auto* pda = app.add_subcommand("pda", "PDA tools");
  pda->require_subcommand(1);
  auto* pda_dump = pda->add_subcommand("dump", "Print the compiled PDA");
  std::string p_grammar;
  bool p_dot = false;
  ToggleFlags p_flags;
  pda_dump->add_option("grammar", p_grammar, "Grammar file, builtin:NAME or schema:PATH")
      ->required();
  pda_dump->add_flag("--dot", p_dot, "Graphviz output");
  pda_dump->add_flag("--no-inline", p_flags.no_inline, "Disable rule inlining");
  pda_dump->add_flag("--no-merge", p_flags.no_merge, "Disable node merging");

  // vocab synth
  auto* vocab_cmd = app.add_subcommand("vocab", "Vocabulary tools");
  vocab_cmd->require_subcommand(1);
  auto* synth = vocab_cmd->add_subcommand("synth", "Write a synthetic vocabulary");
  int32_t v_size = 32000;
  uint64_t v_seed = 20260101;
  bool v_toy = false;
  std::string v_out;
  synth->add_option("--size", v_size, "Token count")->check(CLI::Range(300, 1 << 22));
  synth->add_option("--seed", v_seed, "Seed");
  synth->add_flag("--toy", v_toy, "Write the fixed 200-token toy vocabulary instead");
  synth->add_option("-o,--output", v_out, "Output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compile) {
      auto vocab = LoadVocab(c_vocab);
      auto cg = CompiledGrammar::Compile(GrammarText(c_grammar), vocab, c_flags.Options());
      if (!c_out.empty()) cg->Save(c_out);
      if (c_stats) PrintStats(*cg);
      return 0;
    }
    if (*check) {
      Grammar g = ParseGrammar(GrammarText(k_grammar));
      Pda p = CompilePda(g);
      PdaOracle oracle(p);
      std::string input = ReadFile(k_input);
      if (oracle.Accepts(input)) {
        std::cout << "accepted\n";
        return 0;
      }
      size_t viable = oracle.ViablePrefixLength(input);
      if (viable == input.size()) {
        std::cout << "rejected: input ends early at offset " << viable << "\n";
      } else {
        std::cout << "rejected at byte offset " << viable << "\n";
      }
      return kExitRejected;
    }
    if (*mask_cmd) {
      auto vocab = LoadVocab(m_vocab);
      GrammarMatcher m(CompiledGrammar::Load(m_bundle, vocab));
      if (!m.AcceptBytes(m_prefix)) {
        std::cerr << "prefix rejected\n";
        return kExitRejected;
      }
      for (int32_t id : m_tokens) {
        if (!m.AcceptToken(id)) {
          std::cerr << "token " << id << " rejected\n";
          return kExitRejected;
        }
      }
      DynamicBitset mask = m.GetNextTokenMask();
      if (m_ids) {
        for (int i = mask.FindFirst(); i >= 0; i = mask.FindNext(i + 1)) std::cout << i << '\n';
      } else {
        std::cout << MaskHex(mask) << '\n';
      }
      return 0;
    }
    if (*gen) {
      auto vocab = LoadVocab(g_vocab);
      auto cg = CompiledGrammar::Load(g_bundle, vocab);
      GenerationResult r = GenerateMock(cg, g_llm);
      std::cout << r.text;
      std::cout.flush();
      if (!r.terminated) {
        std::cerr << "\ntoken cap reached before EOS\n";
        return kExitRejected;
      }
      PdaOracle oracle(cg->pda());
      if (!oracle.Accepts(r.text)) {
        std::cerr << "\ngenerated text rejected by the grammar\n";
        return kExitRejected;
      }
      return 0;
    }
    if (*bench) {
      auto vocab = LoadVocab(b_vocab);
      std::string text = GrammarText(b_grammar);
      auto results = RunAblation(text, vocab, AblationConfigs(), b_opts);
      OverlapResult overlap;
      if (b_overlap) {
        auto cg = CompiledGrammar::Compile(text, vocab);
        overlap = RunOverlap(cg, b_forward, b_overlap_steps, b_opts.seed);
      }
      if (b_json) {
        std::cout << BenchResultsToJson(results, b_overlap ? &overlap : nullptr) << '\n';
      } else {
        std::printf("%-16s %10s %10s %10s %10s %12s %10s\n", "config", "mean_us", "median_us",
                    "p99_us", "prep_s", "cache_bytes", "dependent");
        for (const auto& r : results) {
          std::printf("%-16s %10.2f %10.2f %10.2f %10.3f %12zu %10lld\n", r.name.c_str(),
                      r.mean_us, r.median_us, r.p99_us, r.preprocess_s, r.cache_bytes,
                      static_cast<long long>(r.dependent_total));
        }
        if (!results.empty()) {
          std::printf("saved_chars_ratio %.4f\n", results.front().saved_chars_ratio);
        }
        if (b_overlap) {
          std::printf("overlap: mask %.2f us, forward %.2f us, sequential TPOT %.2f us, "
                      "overlapped TPOT %.2f us, ratio %.3f, identical outputs %s\n",
                      overlap.mask_us, overlap.forward_us, overlap.sequential_tpot_us,
                      overlap.overlapped_tpot_us, overlap.ratio(),
                      overlap.outputs_identical ? "yes" : "no");
        }
      }
      return 0;
    }
    if (*schema_compile) {
      SchemaOptions so;
      so.strict_whitespace = s_strict;
      std::string text = SchemaToGrammarText(ReadFile(s_in), so);
      if (s_out.empty()) {
        std::cout << text;
      } else {
        WriteFile(s_out, text);
      }
      return 0;
    }
    if (*pda_dump) {
      PdaOptions po;
      po.inline_rules = !p_flags.no_inline;
      po.merge_nodes = !p_flags.no_merge;
      Pda p = CompilePda(ParseGrammar(GrammarText(p_grammar)), po);
      if (p_dot) {
        std::cout << p.ToDot();
      } else {
        PdaStats s = p.Stats();
        std::cout << "nodes " << s.num_nodes << ", edges " << s.num_edges() << "\n";
        for (int32_t n = 0; n < p.num_nodes(); ++n) {
          const PdaNode& nd = p.node(n);
          std::cout << n << " [" << p.rule(nd.rule).name << (nd.final ? ", final" : "")
                    << (p.rule(nd.rule).start == n ? ", start" : "") << "]\n";
          for (const auto& e : p.OutEdges(n)) {
            std::cout << "  -> " << e.dst << ' ';
            if (e.kind == EdgeKind::kEpsilon) {
              std::cout << "eps";
            } else if (e.kind == EdgeKind::kRuleRef) {
              std::cout << p.rule(e.rule_ref).name;
            } else {
              for (const auto& r : e.ranges) {
                std::string lo(1, static_cast<char>(r.lo)), hi(1, static_cast<char>(r.hi));
                std::cout << '[' << Printable(lo);
                if (r.hi != r.lo) std::cout << '-' << Printable(hi);
                std::cout << ']';
              }
            }
            std::cout << '\n';
          }
        }
      }
      return 0;
    }
    if (*synth) {
      Vocabulary v = v_toy ? ToyVocabulary() : SyntheticVocabulary(v_size, v_seed);
      v.Save(v_out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}
