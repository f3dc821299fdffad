/*!
 *  Copyright (c) 2026 by Contributors
 * \file test_pda.cc
 */
#include <gtest/gtest.h>

#include <deque>
#include <random>

#include "gmask/builtin_grammars.h"
#include "gmask/error.h"
#include "gmask/pda.h"
#include "test_util.h"

namespace gmask {
namespace {

Pda Raw(const std::string& text) { return BuildPda(NormalizeGrammar(ParseGrammar(text))); }

Pda Optimized(const std::string& text, bool inline_rules, bool merge) {
  PdaOptions o;
  o.inline_rules = inline_rules;
  o.merge_nodes = merge;
  return CompilePda(ParseGrammar(text), o);
}

std::vector<OracleStack> ScannableStates(const Pda& pda, const std::set<OracleStack>& states) {
  std::vector<OracleStack> out;
  for (const auto& s : states) {
    if (pda.IsScannable(s.node)) out.push_back(s);
  }
  return out;
}

TEST(PdaBuild, ArrayStringHasTwoStacksAfterOpenQuote) {
  Pda p = Raw(std::string(builtin::ArrayStringGrammar()));
  PdaOracle oracle(p);
  auto states = ScannableStates(p, oracle.PartialStates("[\"a"));
  // The open string is an element followed either by `]` or by `,`: two return frames.
  ASSERT_EQ(states.size(), 2u);
  EXPECT_NE(states[0].frames, states[1].frames);
  EXPECT_TRUE(oracle.Accepts("[\"a\"]"));
  EXPECT_TRUE(oracle.Accepts("\"x\""));
  EXPECT_TRUE(oracle.Accepts("[[\"a\",\"b\"],\"c\"]"));
  EXPECT_FALSE(oracle.Accepts("[]"));
  EXPECT_FALSE(oracle.Accepts("[\"a\""));
  EXPECT_EQ(oracle.ViablePrefixLength("[x"), 1u);
  EXPECT_EQ(oracle.ViablePrefixLength("[\"a\""), 4u);
}

TEST(PdaBuild, EveryNodeCanFinishItsRule) {
  for (const auto& name : testing::CorpusGrammarNames()) {
    for (int mode = 0; mode < 4; ++mode) {
      Pda p = Optimized(builtin::BuiltinGrammarText(name), mode & 1, mode & 2);
      std::vector<std::vector<int32_t>> rev(p.num_nodes());
      for (const auto& e : p.edges()) rev[e.dst].push_back(e.src);
      std::vector<bool> live(p.num_nodes(), false);
      std::deque<int32_t> q;
      for (int32_t n = 0; n < p.num_nodes(); ++n) {
        if (p.node(n).final) {
          live[n] = true;
          q.push_back(n);
        }
      }
      while (!q.empty()) {
        int32_t v = q.front();
        q.pop_front();
        for (int32_t u : rev[v]) {
          if (!live[u]) {
            live[u] = true;
            q.push_back(u);
          }
        }
      }
      for (int32_t n = 0; n < p.num_nodes(); ++n) {
        EXPECT_TRUE(live[n]) << name << " mode " << mode << " node " << n;
      }
      for (const auto& e : p.edges()) {
        EXPECT_EQ(p.node(e.src).rule, p.node(e.dst).rule) << name;
        if (e.kind == EdgeKind::kChar) EXPECT_FALSE(e.ranges.empty());
      }
    }
  }
}

TEST(PdaOptimize, MergeRemovesEpsilonsAndShrinks) {
  std::string json(builtin::JsonGrammar());
  Pda raw = Optimized(json, false, false);
  Pda merged = Optimized(json, false, true);
  EXPECT_LT(merged.num_nodes(), raw.num_nodes());
  EXPECT_LT(merged.Stats().num_epsilon_edges, raw.Stats().num_epsilon_edges);
}

TEST(PdaOptimize, InlineRemovesReferences) {
  std::string json(builtin::JsonGrammar());
  Pda merged = Optimized(json, false, true);
  Pda both = Optimized(json, true, true);
  EXPECT_LT(both.Stats().num_ref_edges, merged.Stats().num_ref_edges);
}

TEST(PdaOptimize, PreservesLanguageOnRandomGrammars) {
  std::mt19937_64 rng(3);
  auto inputs = testing::AllStrings("abc", 6);
  int checked = 0;
  for (int i = 0; i < 80; ++i) {
    std::string text = testing::RandomGrammarText(&rng, 1 + i % 3);
    try {
      ParseGrammar(text);
    } catch (const GrammarError&) {
      continue;
    }
    ++checked;
    Pda raw = Optimized(text, false, false);
    PdaOracle ro(raw);
    for (int mode = 1; mode < 4; ++mode) {
      Pda opt = Optimized(text, mode & 1, mode & 2);
      PdaOracle oo(opt);
      for (const auto& s : inputs) {
        ASSERT_EQ(ro.Accepts(s), oo.Accepts(s)) << text << " mode " << mode << " '" << s << "'";
      }
    }
  }
  EXPECT_GT(checked, 30);
}

TEST(PdaOptimize, IsDeterministic) {
  for (const auto& name : testing::CorpusGrammarNames()) {
    std::string text = builtin::BuiltinGrammarText(name);
    EXPECT_EQ(Optimized(text, true, true), Optimized(text, true, true)) << name;
  }
}

TEST(PdaSerialize, RoundTrip) {
  for (const auto& name : testing::CorpusGrammarNames()) {
    Pda p = Optimized(builtin::BuiltinGrammarText(name), true, true);
    std::string data;
    p.Serialize(&data);
    size_t pos = 0;
    Pda q = Pda::Deserialize(data, &pos);
    EXPECT_EQ(pos, data.size());
    EXPECT_EQ(p, q) << name;
  }
}

TEST(PdaSerialize, RejectsTruncatedAndCorruptData) {
  Pda p = Optimized(std::string(builtin::ArrayStringGrammar()), true, true);
  std::string data;
  p.Serialize(&data);
  for (size_t cut : {size_t{0}, size_t{3}, data.size() / 2, data.size() - 1}) {
    size_t pos = 0;
    EXPECT_THROW(Pda::Deserialize(std::string_view(data).substr(0, cut), &pos), Error);
  }
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    std::string bad = data;
    bad[rng() % bad.size()] ^= static_cast<char>(1 + rng() % 255);
    size_t pos = 0;
    try {
      Pda q = Pda::Deserialize(bad, &pos);
      // A flip that still decodes must yield a structurally valid automaton.
      for (const auto& e : q.edges()) {
        ASSERT_LT(e.dst, q.num_nodes());
        ASSERT_GE(e.dst, 0);
      }
    } catch (const Error&) {
    }
  }
}

TEST(PdaDot, MentionsEveryRule) {
  Pda p = Optimized(std::string(builtin::ArithmeticGrammar()), false, true);
  std::string dot = p.ToDot();
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  for (const auto& r : p.rules()) EXPECT_NE(dot.find(r.name), std::string::npos);
}

TEST(PdaOracle, StateCapIsEnforced) {
  // Each `a` may be followed by `b` or not, so the number of stacks doubles per byte.
  Pda p = Raw("root ::= \"a\" root | \"a\" root \"b\" | \"a\"\n");
  PdaOracle small(p, 64);
  EXPECT_THROW(small.PartialStates("aaaaaaaaaa"), StateCapError);
  PdaOracle big(p);
  EXPECT_TRUE(big.Accepts("aaabb"));
  EXPECT_FALSE(big.Accepts("aabbb"));
}

}  // namespace
}  // namespace gmask
