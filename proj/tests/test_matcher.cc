/*!
 *  Copyright (c) 2026 by Contributors
 * \file test_matcher.cc
 */
#include <gtest/gtest.h>

#include <cstdio>
#include <random>

#include "gmask/builtin_grammars.h"
#include "gmask/compiled_grammar.h"
#include "gmask/error.h"
#include "gmask/json_schema.h"
#include "gmask/matcher.h"
#include "test_util.h"

namespace gmask {
namespace {

using testing::SetBits;
using testing::ToyVocabPtr;

std::shared_ptr<const CompiledGrammar> Toy(const std::string& text,
                                           const CompileOptions& options = {}) {
  return CompiledGrammar::Compile(text, ToyVocabPtr(), options);
}

int32_t TokenId(const Vocabulary& v, const std::string& bytes) {
  for (int32_t id = 0; id < v.size(); ++id) {
    if (!v.IsSpecial(id) && v.token(id) == bytes) return id;
  }
  return -1;
}

TEST(GrammarMatcher, ArrayStringOpenQuoteHasTwoStacks) {
  CompileOptions raw;
  raw.merge_nodes = false;
  raw.inline_rules = false;
  GrammarMatcher m(Toy(std::string(builtin::ArrayStringGrammar()), raw));
  EXPECT_TRUE(m.AcceptBytes("[\"a"));
  EXPECT_EQ(m.num_tops(), 2);
  EXPECT_TRUE(m.AcceptBytes("\""));
  testing::ReferenceModel ref(std::string(builtin::ArrayStringGrammar()));
  EXPECT_EQ(m.GetNextTokenMask().words().size(),
            ref.Mask(*ToyVocabPtr(), "[\"a\"").words().size());
  EXPECT_EQ(SetBits(m.GetNextTokenMask()), SetBits(ref.Mask(*ToyVocabPtr(), "[\"a\"")));
}

TEST(GrammarMatcher, FreshArrayStringMatcher) {
  auto g = Toy(std::string(builtin::ArrayStringGrammar()));
  GrammarMatcher m(g);
  // Tops are the scannable positions of the initial closure: one inside each root alternative.
  PdaOracle oracle(g->pda());
  std::vector<OracleStack> expect;
  for (const auto& s : oracle.InitialStates()) {
    if (g->pda().IsScannable(s.node)) expect.push_back(s);
  }
  EXPECT_EQ(m.CurrentStacks(), expect);
  EXPECT_EQ(m.num_tops(), 2);
  EXPECT_FALSE(m.CanTerminate());
  EXPECT_EQ(m.FindJumpForwardBytes(), "");
  EXPECT_FALSE(m.AcceptBytes("[x"));
  EXPECT_EQ(m.history_size(), 0);
  EXPECT_TRUE(m.AcceptBytes(""));
  EXPECT_EQ(m.history_size(), 1);
}

TEST(GrammarMatcher, EmptyLanguageAllowsEosImmediately) {
  auto g = Toy("root ::= \"a\"?\n");
  GrammarMatcher m(g);
  EXPECT_TRUE(m.CanTerminate());
  EXPECT_TRUE(m.GetNextTokenMask()[g->vocab().eos_id()]);
}

TEST(GrammarMatcher, OnlyEosAfterCompleteSentence) {
  auto g = Toy("root ::= \"a\"\n");
  const Vocabulary& v = g->vocab();
  GrammarMatcher m(g);
  EXPECT_FALSE(m.AcceptToken(v.eos_id()));
  EXPECT_TRUE(m.AcceptToken(TokenId(v, "a")));
  EXPECT_EQ(SetBits(m.GetNextTokenMask()), std::vector<int32_t>{v.eos_id()});
  EXPECT_TRUE(m.AcceptToken(v.eos_id()));
  EXPECT_TRUE(m.IsTerminated());
  EXPECT_EQ(m.GetNextTokenMask().Count(), 0);
  m.Rollback(1);
  EXPECT_FALSE(m.IsTerminated());
  EXPECT_EQ(SetBits(m.GetNextTokenMask()), std::vector<int32_t>{v.eos_id()});
}

TEST(GrammarMatcher, RejectsSpecialAndInvalidTokensWithoutChangingState) {
  auto g = Toy(std::string(builtin::JsonGrammar()));
  const Vocabulary& v = g->vocab();
  GrammarMatcher m(g);
  ASSERT_TRUE(m.AcceptBytes("{\"k\":"));
  auto before = m.CurrentStacks();
  int hist = m.history_size();
  for (int32_t id : v.special_ids()) {
    if (id != v.eos_id()) EXPECT_FALSE(m.AcceptToken(id));
  }
  EXPECT_FALSE(m.AcceptToken(TokenId(v, "}")));
  EXPECT_FALSE(m.AcceptToken(v.eos_id()));
  EXPECT_EQ(m.CurrentStacks(), before);
  EXPECT_EQ(m.history_size(), hist);
  EXPECT_THROW(m.AcceptToken(v.size()), Error);
}

TEST(GrammarMatcher, JumpForward) {
  GrammarMatcher t(Toy("root ::= \"true\"\n"));
  EXPECT_EQ(t.FindJumpForwardBytes(), "true");
  EXPECT_EQ(t.history_size(), 0);
  EXPECT_TRUE(t.AcceptBytes("tr"));
  EXPECT_EQ(t.FindJumpForwardBytes(), "ue");

  SchemaOptions strict;
  strict.strict_whitespace = true;
  std::string text = SchemaToGrammarText(
      R"({"type": "object", "properties": {"a": {"type": "integer"}}, "required": ["a"],
          "additionalProperties": false})",
      strict);
  auto g = Toy(text);
  GrammarMatcher m(g);
  ASSERT_TRUE(m.AcceptBytes("{\"a"));
  std::string forced = m.FindJumpForwardBytes();
  EXPECT_EQ(forced, "\":");
  // Cross-check: the forced bytes are exactly the single-byte choices one step at a time.
  testing::ReferenceModel ref(text);
  std::string prefix = "{\"a";
  for (char c : forced) {
    auto states = ref.oracle().PartialStates(prefix);
    int viable = 0;
    for (int b = 0; b < 256; ++b) {
      if (!ref.oracle().Advance(states, std::string(1, static_cast<char>(b))).empty()) ++viable;
    }
    EXPECT_EQ(viable, 1);
    prefix += c;
  }
  // Forcing stops where termination becomes possible.
  GrammarMatcher n(Toy("root ::= \"ab\" \"c\"?\n"));
  EXPECT_EQ(n.FindJumpForwardBytes(), "ab");
}

TEST(GrammarMatcher, JumpForwardIsCapped) {
  GrammarMatcher m(Toy("root ::= \"x\"* \"y\"\n"));
  GrammarMatcher forced(Toy("root ::= \"x\"{2000} \"y\"\n"));
  EXPECT_EQ(forced.FindJumpForwardBytes().size(), GrammarMatcher::kMaxJumpForwardBytes);
  EXPECT_EQ(m.FindJumpForwardBytes(), "");
}

TEST(GrammarMatcher, MaskAgreesWithAcceptOnEveryToken) {
  auto vocab = ToyVocabPtr();
  for (const auto& name : testing::CorpusGrammarNames()) {
    std::string text = builtin::BuiltinGrammarText(name);
    auto g = Toy(text);
    testing::ReferenceModel ref(text);
    for (const auto& prefix : testing::RandomReachablePrefixes(ref, *vocab, 25, 10, 5)) {
      GrammarMatcher m(g);
      ASSERT_TRUE(m.AcceptBytes(prefix));
      DynamicBitset mask = m.GetNextTokenMask();
      for (int32_t id = 0; id < vocab->size(); ++id) {
        GrammarMatcher b = m.Branch();
        ASSERT_EQ(mask[id], b.AcceptToken(id)) << name << " '" << prefix << "' id " << id;
      }
    }
  }
}

TEST(GrammarMatcher, MaskEqualsOracleAndPerStackUnion) {
  auto vocab = ToyVocabPtr();
  for (const auto& name : testing::CorpusGrammarNames()) {
    std::string text = builtin::BuiltinGrammarText(name);
    testing::ReferenceModel ref(text);
    auto prefixes = testing::RandomReachablePrefixes(ref, *vocab, 40, 16, 21);
    for (bool use_cache : {true, false}) {
      CompileOptions opt;
      opt.use_cache = use_cache;
      auto g = Toy(text, opt);
      PdaOracle oracle(g->pda());
      for (const auto& prefix : prefixes) {
        GrammarMatcher m(g);
        ASSERT_TRUE(m.AcceptBytes(prefix));
        DynamicBitset mask = m.GetNextTokenMask();
        ASSERT_EQ(SetBits(mask), SetBits(ref.Mask(*vocab, prefix))) << name << " '" << prefix << "'";
        // Plain union of the per-stack accepted sets.
        DynamicBitset uni(vocab->size());
        for (const OracleStack& s : m.CurrentStacks()) {
          for (int32_t id = 0; id < vocab->size(); ++id) {
            if (vocab->IsSpecial(id) || vocab->token(id).empty()) continue;
            if (!oracle.Advance({s}, vocab->token(id)).empty()) uni.Set(id);
          }
        }
        if (m.CanTerminate()) uni.Set(vocab->eos_id());
        ASSERT_EQ(SetBits(mask), SetBits(uni)) << name << " '" << prefix << "'";
      }
    }
  }
}

TEST(GrammarMatcher, LongDependentListsUseSortedCheck) {
  // Without context expansion the string-interior node of JSON has many dependent tokens on
  // the synthetic vocabulary, so the sorted path is exercised.
  auto vocab = testing::SyntheticVocabPtr();
  CompileOptions opt;
  opt.context_expansion = false;
  std::string text(builtin::JsonGrammar());
  auto g = CompiledGrammar::Compile(text, vocab, opt);
  CompileOptions no_cache;
  no_cache.use_cache = false;
  auto brute = CompiledGrammar::Compile(text, vocab, no_cache);
  for (std::string prefix : {"[\"ab", "{\"k\": [1, {\"x", "[tr", "[1.5e"}) {
    GrammarMatcher m(g), b(brute);
    ASSERT_TRUE(m.AcceptBytes(prefix));
    ASSERT_TRUE(b.AcceptBytes(prefix));
    EXPECT_EQ(SetBits(m.GetNextTokenMask()), SetBits(b.GetNextTokenMask())) << prefix;
  }
}

TEST(GrammarMatcher, RollbackRestoresMasks) {
  auto g = Toy(std::string(builtin::JsonGrammar()));
  const Vocabulary& v = g->vocab();
  GrammarMatcher m(g, 4);
  DynamicBitset fresh = m.GetNextTokenMask();
  std::mt19937_64 rng(1);
  std::vector<DynamicBitset> masks{fresh};
  for (int i = 0; i < 4; ++i) {
    int32_t id = testing::PickAllowed(masks.back(), v.eos_id(), &rng);
    ASSERT_TRUE(m.AcceptToken(id));
    masks.push_back(m.GetNextTokenMask());
  }
  EXPECT_EQ(m.history_size(), 4);
  m.Rollback(2);
  DynamicBitset restored = m.GetNextTokenMask();
  ASSERT_EQ(restored.words().size(), masks[2].words().size());
  EXPECT_TRUE(std::equal(restored.words().begin(), restored.words().end(),
                         masks[2].words().begin()));
  m.Rollback(2);
  EXPECT_EQ(SetBits(m.GetNextTokenMask()), SetBits(fresh));
  EXPECT_THROW(m.Rollback(1), Error);
  EXPECT_THROW(m.Rollback(-1), Error);
}

TEST(GrammarMatcher, HistoryWindowBoundsRollback) {
  auto g = Toy("root ::= \"a\"*\n");
  GrammarMatcher m(g, 3);
  for (int i = 0; i < 10; ++i) ASSERT_TRUE(m.AcceptBytes("a"));
  EXPECT_EQ(m.history_size(), 3);
  EXPECT_THROW(m.Rollback(4), Error);
  EXPECT_NO_THROW(m.Rollback(3));
  EXPECT_EQ(m.history_size(), 0);
}

TEST(GrammarMatcher, BranchesDivergeIndependently) {
  auto g = Toy(std::string(builtin::JsonGrammar()));
  GrammarMatcher m(g);
  ASSERT_TRUE(m.AcceptBytes("[1, "));
  GrammarMatcher b = m.Branch();
  EXPECT_EQ(SetBits(b.GetNextTokenMask()), SetBits(m.GetNextTokenMask()));
  ASSERT_TRUE(m.AcceptBytes("\"s"));
  ASSERT_TRUE(b.AcceptBytes("{"));
  GrammarMatcher im(g), ib(g);
  ASSERT_TRUE(im.AcceptBytes("[1, \"s"));
  ASSERT_TRUE(ib.AcceptBytes("[1, {"));
  EXPECT_EQ(SetBits(m.GetNextTokenMask()), SetBits(im.GetNextTokenMask()));
  EXPECT_EQ(SetBits(b.GetNextTokenMask()), SetBits(ib.GetNextTokenMask()));
  EXPECT_EQ(m.CurrentStacks(), im.CurrentStacks());
  b.Rollback(1);
  EXPECT_EQ(b.history_size(), m.history_size() - 1);
}

TEST(GrammarMatcher, NestedBranchesShareTheArena) {
  auto g = Toy(std::string(builtin::JsonGrammar()));
  std::vector<GrammarMatcher> chain;
  chain.emplace_back(g);
  size_t base = chain.back().arena()->num_live();
  for (int i = 0; i < 100; ++i) {
    chain.push_back(chain.back().Branch());
    ASSERT_TRUE(chain.back().AcceptBytes("["));
  }
  // Each level pushes a bounded number of new frames; copying stacks would grow quadratically.
  size_t grown = chain.back().arena()->num_live() - base;
  EXPECT_LE(grown, 100u * 4u);
  EXPECT_EQ(chain.front().arena(), chain.back().arena());
  chain.clear();
}

TEST(GrammarMatcher, ArenaReclaimsFramesOfDroppedMatchers) {
  auto g = Toy(std::string(builtin::JsonGrammar()));
  GrammarMatcher m(g, 2);
  size_t base = m.arena()->num_live();
  {
    GrammarMatcher b = m.Branch();
    for (int i = 0; i < 50; ++i) ASSERT_TRUE(b.AcceptBytes("["));
  }
  EXPECT_EQ(m.arena()->num_live(), base);
}

TEST(CompiledGrammar, BundleRoundTripAndVocabCheck) {
  auto g = Toy(std::string(builtin::ArrayStringGrammar()));
  std::string bytes = g->Serialize();
  EXPECT_EQ(bytes, Toy(std::string(builtin::ArrayStringGrammar()))->Serialize());
  EXPECT_EQ(bytes.substr(0, 4), "GMC1");
  auto back = CompiledGrammar::Deserialize(bytes, ToyVocabPtr());
  EXPECT_EQ(back->pda(), g->pda());
  EXPECT_EQ(*back->cache(), *g->cache());
  EXPECT_EQ(back->Serialize(), bytes);

  auto other = std::make_shared<const Vocabulary>(SyntheticVocabulary(1000, 3));
  try {
    CompiledGrammar::Deserialize(bytes, other);
    FAIL() << "expected a vocabulary mismatch";
  } catch (const VocabMismatchError& e) {
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(ToyVocabPtr()->Hash()));
    EXPECT_NE(std::string(e.what()).find(hash), std::string::npos) << e.what();
  }
  for (size_t cut : {size_t{3}, size_t{20}, bytes.size() - 1}) {
    EXPECT_THROW(CompiledGrammar::Deserialize(bytes.substr(0, cut), ToyVocabPtr()), Error);
  }
  EXPECT_THROW(CompiledGrammar::Deserialize(bytes + "x", ToyVocabPtr()), Error);
}

TEST(CompiledGrammar, UnoptimizedBundleKeepsFlags) {
  CompileOptions opt;
  opt.inline_rules = false;
  opt.merge_nodes = false;
  auto g = Toy(std::string(builtin::ArrayStringGrammar()), opt);
  auto back = CompiledGrammar::Deserialize(g->Serialize(), ToyVocabPtr());
  EXPECT_FALSE(back->options().inline_rules);
  EXPECT_FALSE(back->options().merge_nodes);
  EXPECT_TRUE(back->options().use_cache);
  GrammarMatcher m(back);
  EXPECT_TRUE(m.AcceptBytes("[\"a\"]"));
  EXPECT_TRUE(m.CanTerminate());
}

}  // namespace
}  // namespace gmask
