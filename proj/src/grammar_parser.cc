/*!
 *  Copyright (c) 2026 by Contributors
 * \file grammar_parser.cc
 * \brief Recursive-descent parser for the EBNF-like grammar text.
 */
#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "gmask/error.h"
#include "gmask/grammar.h"
#include "utf8.h"

namespace gmask {

namespace {

bool IsNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// One item of a character class: a code point range, or a raw byte range given with \x.
struct ClassItem {
  uint32_t lo;
  uint32_t hi;
  bool raw_byte;
};

class GrammarParser {
 public:
  explicit GrammarParser(std::string_view text) : text_(text) {}

  Grammar Parse() {
    std::vector<Rule> rules;
    std::unordered_map<std::string, int32_t> rule_ids;
    SkipSpace();
    while (pos_ < text_.size()) {
      size_t name_pos = pos_;
      std::string name = ParseName();
      if (name.empty()) Fail("expected a rule name");
      SkipSpace();
      if (text_.substr(pos_, 3) != "::=") Fail("expected '::='");
      pos_ += 3;
      SkipSpace();
      if (rule_ids.count(name)) Fail("duplicate rule name '" + name + "'", name_pos);
      rule_ids[name] = static_cast<int32_t>(rules.size());
      RuleExpr body = ParseChoice();
      rules.push_back(Rule{name, std::move(body)});
      SkipSpace();
      if (pos_ < text_.size() && !AtRuleStart()) Fail("unexpected character");
    }
    if (rules.empty()) throw GrammarError("empty grammar: no rules defined");

    for (const auto& ref : pending_refs_) {
      if (!rule_ids.count(ref.name)) {
        Fail("undefined rule reference '" + ref.name + "'", ref.pos);
      }
    }
    for (auto& rule : rules) ResolveRefs(&rule.body, rule_ids);

    auto root_it = rule_ids.find("root");
    int32_t root = root_it == rule_ids.end() ? 0 : root_it->second;
    Grammar grammar(std::move(rules), root);
    ValidateGrammar(grammar);
    return grammar;
  }

 private:
  struct PendingRef {
    std::string name;
    size_t pos;
  };

  [[noreturn]] void Fail(const std::string& msg, std::optional<size_t> at = std::nullopt) const {
    size_t p = std::min(at.value_or(pos_), text_.size());
    int line = 1, col = 1;
    for (size_t i = 0; i < p; ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw GrammarError(msg, line, col);
  }

  char Peek(size_t off = 0) const { return pos_ + off < text_.size() ? text_[pos_ + off] : '\0'; }

  void SkipSpace() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string ParseName() {
    size_t start = pos_;
    while (pos_ < text_.size() && IsNameChar(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  // Lookahead: `name ::=` begins the next rule.
  bool AtRuleStart() const {
    size_t p = pos_;
    size_t start = p;
    while (p < text_.size() && IsNameChar(text_[p])) ++p;
    if (p == start) return false;
    while (p < text_.size() && (text_[p] == ' ' || text_[p] == '\t' || text_[p] == '\r' ||
                                text_[p] == '\n')) {
      ++p;
    }
    return text_.substr(p, 3) == "::=";
  }

  RuleExpr ParseChoice() {
    std::vector<RuleExpr> alts;
    alts.push_back(ParseSequence());
    SkipSpace();
    while (Peek() == '|') {
      ++pos_;
      SkipSpace();
      alts.push_back(ParseSequence());
      SkipSpace();
    }
    if (alts.size() == 1) return std::move(alts[0]);
    return MakeChoice(std::move(alts));
  }

  RuleExpr ParseSequence() {
    std::vector<RuleExpr> items;
    while (true) {
      SkipSpace();
      char c = Peek();
      if (pos_ >= text_.size() || c == '|' || c == ')' || AtRuleStart()) break;
      items.push_back(ParsePostfix(ParsePrimary()));
    }
    if (items.empty()) Fail("expected an expression");
    if (items.size() == 1) return std::move(items[0]);
    return MakeSequence(std::move(items));
  }

  RuleExpr ParsePostfix(RuleExpr expr) {
    while (true) {
      char c = Peek();
      if (c == '*') {
        ++pos_;
        expr = MakeRepeat(std::move(expr), 0, std::nullopt);
      } else if (c == '+') {
        ++pos_;
        expr = MakeRepeat(std::move(expr), 1, std::nullopt);
      } else if (c == '?') {
        ++pos_;
        expr = MakeRepeat(std::move(expr), 0, 1);
      } else if (c == '{') {
        size_t brace = pos_;
        ++pos_;
        SkipSpace();
        int32_t lo = ParseInt();
        SkipSpace();
        std::optional<int32_t> hi = lo;
        if (Peek() == ',') {
          ++pos_;
          SkipSpace();
          if (Peek() == '}') {
            hi = std::nullopt;
          } else {
            hi = ParseInt();
          }
          SkipSpace();
        }
        if (Peek() != '}') Fail("expected '}'");
        ++pos_;
        if (hi && *hi < lo) Fail("repetition bound {m,n} requires m <= n", brace);
        expr = MakeRepeat(std::move(expr), lo, hi);
      } else {
        return expr;
      }
    }
  }

  int32_t ParseInt() {
    size_t start = pos_;
    int64_t v = 0;
    while (std::isdigit(static_cast<unsigned char>(Peek()))) {
      v = v * 10 + (Peek() - '0');
      if (v > 1'000'000) Fail("repetition bound too large", start);
      ++pos_;
    }
    if (pos_ == start) Fail("expected an integer");
    return static_cast<int32_t>(v);
  }

  RuleExpr ParsePrimary() {
    char c = Peek();
    if (c == '"') return ParseLiteral();
    if (c == '[') return ParseClass();
    if (c == '(') {
      ++pos_;
      SkipSpace();
      RuleExpr inner = ParseChoice();
      SkipSpace();
      if (Peek() != ')') Fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (IsNameChar(c)) {
      size_t start = pos_;
      std::string name = ParseName();
      int32_t idx = static_cast<int32_t>(pending_refs_.size());
      pending_refs_.push_back({name, start});
      return MakeRuleRef(idx);
    }
    Fail(pos_ >= text_.size() ? "unexpected end of input" : "unexpected character");
  }

  // Parses one escape after the backslash. Sets *raw_byte when the escape names a byte.
  uint32_t ParseEscape(bool* raw_byte) {
    *raw_byte = false;
    size_t start = pos_ - 1;
    char c = Peek();
    ++pos_;
    switch (c) {
      case 'n':
        return '\n';
      case 't':
        return '\t';
      case 'r':
        return '\r';
      case '0':
        return 0;
      case 'x': {
        *raw_byte = true;
        return ParseHex(2, start);
      }
      case 'u':
        return ParseHex(4, start);
      case 'U':
        return ParseHex(8, start);
      case '\0':
        Fail("unterminated escape", start);
      default:
        if (static_cast<unsigned char>(c) >= 0x80) Fail("invalid escape", start);
        return static_cast<unsigned char>(c);
    }
  }

  uint32_t ParseHex(int digits, size_t start) {
    uint32_t v = 0;
    for (int i = 0; i < digits; ++i) {
      int h = HexValue(Peek());
      if (h < 0) Fail("invalid hex escape", start);
      v = v * 16 + h;
      ++pos_;
    }
    if (v > kMaxCodePoint) Fail("code point out of range", start);
    return v;
  }

  // Reads one character (escape or UTF-8 code point) inside a literal or class.
  uint32_t ParseChar(bool* raw_byte) {
    if (Peek() == '\\') {
      ++pos_;
      return ParseEscape(raw_byte);
    }
    *raw_byte = false;
    size_t start = pos_;
    int32_t cp = DecodeUtf8(text_, &pos_);
    if (cp < 0) Fail("invalid UTF-8 in grammar text", start);
    return static_cast<uint32_t>(cp);
  }

  RuleExpr ParseLiteral() {
    size_t start = pos_;
    ++pos_;
    std::string bytes;
    while (true) {
      if (pos_ >= text_.size()) Fail("unterminated string literal", start);
      char c = Peek();
      if (c == '"') {
        ++pos_;
        break;
      }
      if (c == '\n') Fail("newline in string literal");
      bool raw = false;
      uint32_t v = ParseChar(&raw);
      if (raw) {
        bytes.push_back(static_cast<char>(v));
      } else {
        bytes += EncodeUtf8(v);
      }
    }
    if (bytes.empty()) return MakeEmpty();
    return MakeLiteral(std::move(bytes));
  }

  RuleExpr ParseClass() {
    size_t start = pos_;
    ++pos_;
    bool negated = false;
    if (Peek() == '^') {
      negated = true;
      ++pos_;
    }
    std::vector<ClassItem> items;
    while (true) {
      if (pos_ >= text_.size()) Fail("unterminated character class", start);
      if (Peek() == ']') {
        ++pos_;
        break;
      }
      bool raw_lo = false;
      uint32_t lo = ParseChar(&raw_lo);
      uint32_t hi = lo;
      bool raw_hi = raw_lo;
      if (Peek() == '-' && Peek(1) != ']' && pos_ + 1 < text_.size()) {
        ++pos_;
        hi = ParseChar(&raw_hi);
      }
      if (hi < lo) Fail("character range is out of order", start);
      items.push_back({lo, hi, raw_lo || raw_hi});
    }

    bool has_wide = false, has_raw_high = false;
    for (const auto& it : items) {
      if (it.raw_byte && it.hi >= 0x80) has_raw_high = true;
      if (!it.raw_byte && it.hi >= 0x80) has_wide = true;
    }
    if (has_wide && has_raw_high) {
      Fail("character class mixes \\x bytes >= 0x80 with non-ASCII characters", start);
    }
    if (!has_wide) {
      std::vector<ByteRange> ranges;
      for (const auto& it : items) {
        ranges.push_back({static_cast<uint8_t>(it.lo), static_cast<uint8_t>(it.hi)});
      }
      return MakeByteClass(NormalizeRanges(std::move(ranges)), negated);
    }
    return LowerCodePointClass(std::move(items), negated);
  }

  // Classes over non-ASCII code points become a choice of UTF-8 byte sequences.
  static RuleExpr LowerCodePointClass(std::vector<ClassItem> items, bool negated) {
    std::sort(items.begin(), items.end(),
              [](const ClassItem& a, const ClassItem& b) { return a.lo < b.lo; });
    std::vector<std::pair<uint32_t, uint32_t>> ranges;
    for (const auto& it : items) {
      if (!ranges.empty() && it.lo <= ranges.back().second + 1) {
        ranges.back().second = std::max(ranges.back().second, it.hi);
      } else {
        ranges.push_back({it.lo, it.hi});
      }
    }
    if (negated) {
      std::vector<std::pair<uint32_t, uint32_t>> comp;
      uint32_t next = 0;
      for (const auto& [lo, hi] : ranges) {
        if (lo > next) comp.push_back({next, lo - 1});
        next = hi + 1;
      }
      if (next <= kMaxCodePoint) comp.push_back({next, kMaxCodePoint});
      ranges = std::move(comp);
    }
    std::vector<ByteRange> single;
    std::vector<RuleExpr> alts;
    for (const auto& [lo, hi] : ranges) {
      for (auto& seq : Utf8Sequences(lo, hi)) {
        if (seq.size() == 1) {
          single.push_back(seq[0]);
          continue;
        }
        std::vector<RuleExpr> parts;
        for (const auto& r : seq) parts.push_back(MakeByteClass({r}));
        alts.push_back(MakeSequence(std::move(parts)));
      }
    }
    if (!single.empty()) {
      alts.insert(alts.begin(), MakeByteClass(NormalizeRanges(std::move(single))));
    }
    if (alts.empty()) return MakeByteClass({});
    if (alts.size() == 1) return std::move(alts[0]);
    return MakeChoice(std::move(alts));
  }

  void ResolveRefs(RuleExpr* expr, const std::unordered_map<std::string, int32_t>& ids) {
    std::visit(
        [&](auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, RuleRefExpr>) {
            node.rule_id = ids.at(pending_refs_[node.rule_id].name);
          } else if constexpr (std::is_same_v<T, SequenceExpr> || std::is_same_v<T, ChoiceExpr>) {
            for (auto& item : node.items) ResolveRefs(&item, ids);
          } else if constexpr (std::is_same_v<T, RepeatExpr>) {
            ResolveRefs(&*node.body, ids);
          }
        },
        expr->node);
  }

  std::string_view text_;
  size_t pos_ = 0;
  std::vector<PendingRef> pending_refs_;
};

}  // namespace

Grammar ParseGrammar(std::string_view text) { return GrammarParser(text).Parse(); }

}  // namespace gmask
