/*!
 *  Copyright (c) 2026 by Contributors
 * \file synthetic_vocab.cc
 * \brief Deterministic vocabularies for tests and benchmarks.
 */
#include <random>
#include <unordered_set>

#include "gmask/error.h"
#include "gmask/vocabulary.h"
#include "utf8.h"

namespace gmask {

namespace {

class TokenList {
 public:
  bool Add(const std::string& t) {
    if (t.empty() || !seen_.insert(t).second) return false;
    tokens_.push_back(t);
    return true;
  }
  size_t size() const { return tokens_.size(); }
  std::vector<std::string>& tokens() { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_set<std::string> seen_;
};

const char* const kCommonWords[] = {
    "the",    "of",     "and",   "to",     "in",      "is",     "that",    "for",    "it",
    "as",     "was",    "with",  "be",     "by",      "on",     "not",     "he",     "this",
    "are",    "or",     "his",   "from",   "at",      "which",  "but",     "have",   "an",
    "had",    "they",   "you",   "were",   "their",   "one",    "all",     "we",     "can",
    "her",    "has",    "there", "been",   "if",      "more",   "when",    "will",   "would",
    "who",    "so",     "no",    "name",   "value",   "type",   "id",      "data",   "list",
    "item",   "items",  "key",   "true",   "false",   "null",   "string",  "number", "object",
    "array",  "user",   "admin", "email",  "age",     "title",  "text",    "error",  "result",
    "return", "def",    "class", "import", "function", "const",  "let",     "var",    "if",
    "else",   "while",  "self",  "print",  "json",    "http",   "https",   "www",    "com",
    "time",   "date",   "year",  "first",  "last",    "new",    "good",    "high",   "small",
    "large",  "next",   "early", "young",  "important", "public", "private", "status", "count",
    "total",  "price",  "city",  "country", "address", "phone", "message", "content", "description",
};

const char* const kSuffixes[] = {"",   "s",    "ed",  "ing", "er",   "ers",  "ly",  "tion",
                                 "al", "ment", "ness", "able", "ize", "es",  "est", "ity"};

const char* const kSyllables[] = {
    "ba", "be", "bi", "bo", "ca", "ce", "co", "cu", "da", "de", "di", "do", "fa", "fe", "fi", "ga",
    "ge", "go", "ha", "he", "hi", "ho", "ja", "ka", "ke", "la", "le", "li", "lo", "lu", "ma", "me",
    "mi", "mo", "mu", "na", "ne", "ni", "no", "pa", "pe", "pi", "po", "ra", "re", "ri", "ro", "ru",
    "sa", "se", "si", "so", "ta", "te", "ti", "to", "tu", "va", "ve", "vi", "wa", "we", "ya", "za",
    "str", "con", "pro", "ex", "in", "an", "en", "on", "un", "ar", "er", "or", "al", "el", "il"};

std::string Capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

}  // namespace

Vocabulary SyntheticVocabulary(int32_t size, uint64_t seed) {
  const int32_t kNumSpecial = 4;
  GMASK_CHECK(size >= 256 + kNumSpecial) << "synthetic vocabulary needs at least 260 tokens";
  int32_t target = size - kNumSpecial;
  std::mt19937_64 rng(seed);
  TokenList list;
  auto full = [&] { return static_cast<int32_t>(list.size()) >= target; };
  auto add = [&](const std::string& t) {
    if (!full()) list.Add(t);
  };

  for (int b = 0; b < 256; ++b) add(std::string(1, static_cast<char>(b)));
  for (int n = 2; n <= 16; ++n) add(std::string(n, ' '));
  for (int n = 1; n <= 4; ++n) {
    add(std::string(n, '\n'));
    add(std::string(n, '\t'));
    add(std::string(n, '\n') + "  ");
    add(std::string(n, '\n') + "    ");
    add(" " + std::string(n, '\n'));
  }
  for (int i = 0; i < 1000; ++i) add(std::to_string(i));
  for (int i = 0; i < 100; ++i) add(" " + std::to_string(i));
  for (int i = 1990; i <= 2030; ++i) add(std::to_string(i));

  const std::string punct = "{}[]()<>:;,.\"'!?-_=+*/\\|&@#$%^~`";
  for (char a : punct) {
    add(std::string(" ") + a);
    add(std::string(1, a) + " ");
    for (char b : punct) add(std::string(1, a) + b);
  }
  for (const char* t : {"\": \"", "\", \"", "\": {\"", "\"}, {\"", "\"],", "\"},", "[{\"", "\": [",
                        "\":\"", "\",\"", "\": ", "\", ", "\"}}", "\"]}", "}}", "]}", "}]", "},\n",
                        "],\n", "\",\n", "{\n", "[\n", "\n}", "\n]", "\": [\"", "\": true", "\": false",
                        "\": null", "\": 0", "\": 1", "=>", "==", "!=", "<=", ">=", "&&", "||", "::",
                        "->", "/*", "*/", "//", "#include", "</", "/>", "<!--", "-->", "...", "\\n",
                        "\\\"", "\\u00", "\\t", "\\\\"}) {
    add(t);
  }

  for (const char* w : kCommonWords) {
    for (const char* suf : {"", "s", "ed", "ing"}) {
      std::string word = std::string(w) + suf;
      add(word);
      add(" " + word);
      add(Capitalize(word));
      add(" " + Capitalize(word));
      add("\"" + word);
      add(word + "\"");
    }
  }

  // UTF-8 fragments and short words from several scripts.
  const std::vector<std::pair<uint32_t, uint32_t>> scripts = {
      {0xE0, 0xFF}, {0x3B1, 0x3C9}, {0x430, 0x44F}, {0x4E00, 0x4FFF}, {0x3041, 0x3093}};
  for (const auto& [lo, hi] : scripts) {
    for (uint32_t cp = lo; cp <= hi && cp < lo + 64; ++cp) add(EncodeUtf8(cp));
  }
  for (int i = 0; i < 1200 && !full(); ++i) {
    const auto& [lo, hi] = scripts[rng() % scripts.size()];
    int len = 1 + static_cast<int>(rng() % 3);
    std::string w = (rng() % 2) ? " " : "";
    for (int k = 0; k < len; ++k) w += EncodeUtf8(lo + static_cast<uint32_t>(rng() % (hi - lo + 1)));
    add(w);
  }

  // Stems with suffix families, as subword vocabularies tend to contain.
  const size_t num_syl = sizeof(kSyllables) / sizeof(kSyllables[0]);
  const size_t num_suf = sizeof(kSuffixes) / sizeof(kSuffixes[0]);
  while (!full()) {
    int syllables = 1 + static_cast<int>(rng() % 3);
    std::string stem;
    for (int k = 0; k < syllables; ++k) stem += kSyllables[rng() % num_syl];
    int variants = 1 + static_cast<int>(rng() % 5);
    for (int v = 0; v < variants; ++v) {
      std::string word = stem + kSuffixes[v == 0 ? 0 : rng() % num_suf];
      add(" " + word);
      if (rng() % 2) add(word);
      if (rng() % 4 == 0) add(" " + Capitalize(word));
      if (rng() % 16 == 0) add(word + ",");
      if (rng() % 16 == 0) add(word + ".");
    }
  }

  std::vector<std::string> tokens = std::move(list.tokens());
  int32_t eos = static_cast<int32_t>(tokens.size());
  for (const char* s : {"<eos>", "<bos>", "<pad>", "<unk>"}) tokens.push_back(s);
  return Vocabulary(std::move(tokens), eos, {eos, eos + 1, eos + 2, eos + 3});
}

Vocabulary ToyVocabulary() {
  const int32_t kSize = 200;
  std::vector<std::string> tokens;
  std::unordered_set<std::string> seen;
  auto add = [&](const std::string& t) {
    if (static_cast<int32_t>(tokens.size()) < kSize - 2 && seen.insert(t).second) {
      tokens.push_back(t);
    }
  };
  add("");
  for (int c = 0x20; c < 0x7F; ++c) add(std::string(1, static_cast<char>(c)));
  for (const char* t : {"\n", "\t", "\r"}) add(t);
  for (const char* t :
       {"[\"", "\"]", "\",", "\":", "\"}", "{\"", "[]", "{}", "true", "false", "null", "tr", "ue",
        "fal", "se", "nu", "ll", "12", "-1", "0.", ".5", "e+", "E-", "10", "\", \"", "\": \"", "],",
        "},", "]]", "[[", "\\n", "\\\"", "\\u00", "ab", "abc", "a\"", "\"a", "\"x", "\" ", " \"",
        "  ", " ,", ", ", ",\"", ":\"", ":[", "[{", "}]", "null,", "true]", "+(", ")*", "((", "))",
        "1+", "2*", "3)", "(1", "/2", "-3", "99", "0)", ")+", "<a>", "</a>", "<b>", "</b>", "<br/>",
        "<a", "<b", "<br", "/>", "</", "&amp;", "&lt;", "&gt;", "&quot;", "amp", "; ", " x=\"",
        "=\"", "\">", "\"/>", "id", "class", "<a><b>", "\"name\"", "\"age\"", "\"role\"",
        "\"admin\"", "\"user\"", "\"guest\"", "\"tags\"", "\"email\"", "\"active\"", "name", "age",
        ": ", "{\"name\": \"", "\"admin\"}", ", \"age\": ", "\xC3\xA9", "\xC3", "\xA9",
        "\xE6\x97\xA5", "\xC3\xBC", "\xD0\xB6\xD0\xB8"}) {
    add(t);
  }
  for (char a = 'a'; static_cast<int32_t>(tokens.size()) < kSize - 2; ++a) {
    add(std::string(1, a) + "\"");
  }
  tokens.push_back("<pad>");
  tokens.push_back("<eos>");
  int32_t eos = kSize - 1;
  return Vocabulary(std::move(tokens), eos, {eos - 1, eos});
}

}  // namespace gmask
