/*!
 *  Copyright (c) 2026 by Contributors
 * \file test_vocabulary.cc
 */
#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>

#include "gmask/error.h"
#include "gmask/vocabulary.h"

namespace gmask {
namespace {

TEST(Vocabulary, ParsesJsonWithRawByteEscapes) {
  Vocabulary v = Vocabulary::FromJson(
      R"({"byte_level": false, "eos_id": 3, "special": [3, 4],
          "tokens": ["a", "\xff\x00", "é😀", "<eos>", "<pad>"]})");
  ASSERT_EQ(v.size(), 5);
  EXPECT_EQ(v.token(1), std::string("\xff\x00", 2));
  EXPECT_EQ(v.token(2), "\xc3\xa9\xf0\x9f\x98\x80");
  EXPECT_EQ(v.eos_id(), 3);
  EXPECT_TRUE(v.IsSpecial(3));
  EXPECT_TRUE(v.IsSpecial(4));
  EXPECT_FALSE(v.IsSpecial(0));
}

TEST(Vocabulary, EosIsAlwaysSpecial) {
  Vocabulary v({"a", "b", "</s>"}, 2, {});
  EXPECT_TRUE(v.IsSpecial(2));
  EXPECT_EQ(v.special_ids(), std::vector<int32_t>{2});
}

TEST(Vocabulary, DecodesByteLevelTokens) {
  Vocabulary v = Vocabulary::FromJson(
      R"({"byte_level": true, "eos_id": 2, "special": [2], "tokens": ["Ġa", "Ċ", "<eos>"]})");
  EXPECT_EQ(v.token(0), " a");
  EXPECT_EQ(v.token(1), "\n");
  EXPECT_EQ(v.token(2), "<eos>");
  EXPECT_THROW(DecodeByteLevel("\xe4\xb8\xad"), Error);
}

TEST(Vocabulary, RejectsMalformedFiles) {
  EXPECT_THROW(Vocabulary::FromJson(R"({"eos_id": 0})"), Error);
  EXPECT_THROW(Vocabulary::FromJson(R"({"tokens": ["a"]})"), Error);
  EXPECT_THROW(Vocabulary::FromJson(R"({"eos_id": 5, "tokens": ["a"]})"), Error);
  EXPECT_THROW(Vocabulary::FromJson(R"({"eos_id": 0, "special": [0, 0], "tokens": ["a"]})"),
               Error);
  EXPECT_THROW(Vocabulary::FromJson(R"({"eos_id": 0, "tokens": ["\xZZ"]})"), Error);
  EXPECT_THROW(Vocabulary::FromJson(R"({"eos_id": 0, "tokens": ["a")"), Error);
}

TEST(Vocabulary, JsonRoundTripPreservesHash) {
  Vocabulary v = SyntheticVocabulary(2000, 9);
  Vocabulary w = Vocabulary::FromJson(v.ToJson());
  EXPECT_EQ(v.tokens(), w.tokens());
  EXPECT_EQ(v.Hash(), w.Hash());
  std::string path = ::testing::TempDir() + "/vocab_roundtrip.json";
  v.Save(path);
  EXPECT_EQ(Vocabulary::Load(path).Hash(), v.Hash());
  std::remove(path.c_str());
}

TEST(Vocabulary, HashDependsOnContent) {
  Vocabulary a({"a", "b", "<eos>"}, 2, {2});
  Vocabulary b({"a", "c", "<eos>"}, 2, {2});
  Vocabulary c({"a", "b", "<eos>"}, 2, {1, 2});
  EXPECT_NE(a.Hash(), b.Hash());
  EXPECT_NE(a.Hash(), c.Hash());
}

TEST(SortedIndex, MatchesIndependentSortAndLcp) {
  Vocabulary v = SyntheticVocabulary(3000, 4);
  SortedVocabIndex idx = BuildSortedIndex(v);
  std::vector<int32_t> expect;
  for (int32_t i = 0; i < v.size(); ++i) {
    if (!v.IsSpecial(i) && !v.token(i).empty()) expect.push_back(i);
  }
  std::stable_sort(expect.begin(), expect.end(),
                   [&](int32_t a, int32_t b) { return v.token(a) < v.token(b); });
  ASSERT_EQ(idx.order, expect);
  int64_t total = 0, shared = 0;
  for (size_t k = 0; k < expect.size(); ++k) {
    const std::string& t = v.token(expect[k]);
    size_t l = 0;
    if (k > 0) {
      const std::string& p = v.token(expect[k - 1]);
      while (l < t.size() && l < p.size() && t[l] == p[l]) ++l;
    }
    ASSERT_EQ(idx.lcp[k], static_cast<int32_t>(l));
    total += static_cast<int64_t>(t.size());
    shared += static_cast<int64_t>(l);
  }
  EXPECT_EQ(idx.total_bytes, total);
  EXPECT_EQ(idx.shared_bytes, shared);
  EXPECT_DOUBLE_EQ(SavedCharsRatio(idx), static_cast<double>(total - shared) / total);
}

TEST(SyntheticVocabulary, IsDeterministicAndShaped) {
  Vocabulary a = SyntheticVocabulary();
  Vocabulary b = SyntheticVocabulary();
  EXPECT_EQ(a.Hash(), b.Hash());
  EXPECT_EQ(a.size(), 32000);
  std::set<std::string> distinct(a.tokens().begin(), a.tokens().end());
  EXPECT_EQ(distinct.size(), a.tokens().size());
  for (int c = 0; c < 256; ++c) {
    EXPECT_TRUE(distinct.count(std::string(1, static_cast<char>(c)))) << c;
  }
  EXPECT_EQ(a.token(a.eos_id()), "<eos>");
  EXPECT_EQ(a.special_ids().size(), 4u);
}

TEST(ToyVocabulary, HasTwoHundredTokens) {
  Vocabulary v = ToyVocabulary();
  EXPECT_EQ(v.size(), 200);
  EXPECT_EQ(v.eos_id(), 199);
  std::set<std::string> distinct(v.tokens().begin(), v.tokens().end());
  EXPECT_EQ(distinct.size(), 200u);
  for (char c = 0x20; c < 0x7f; ++c) EXPECT_TRUE(distinct.count(std::string(1, c))) << c;
}

}  // namespace
}  // namespace gmask
