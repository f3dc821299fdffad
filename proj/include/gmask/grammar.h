/*!
 *  Copyright (c) 2026 by Contributors
 * \file gmask/grammar.h
 * \brief In-memory context-free grammar over bytes, and its EBNF-like text front end.
 *
 * Surface syntax (see docs/grammar_syntax.md for the full EBNF):
 *
 *   root   ::= "[" items "]"        # rules are `name ::= expr`, may span lines
 *   items  ::= value ("," value)*
 *   value  ::= [a-z]+ | "\x00" | [^"\\]{1,4}
 *
 * Literals are raw UTF-8. Character classes are over code points; classes that only mention
 * ASCII are kept as byte classes (a negated ASCII class therefore matches every byte >= 0x80
 * individually), while classes naming code points >= 0x80 are lowered to UTF-8 byte sequences.
 */
#ifndef GMASK_GRAMMAR_H_
#define GMASK_GRAMMAR_H_

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gmask {

/*! \brief Inclusive byte range. */
struct ByteRange {
  uint8_t lo;
  uint8_t hi;
  auto operator<=>(const ByteRange&) const = default;
};

/*! \brief Sort, merge overlapping and adjacent ranges. */
std::vector<ByteRange> NormalizeRanges(std::vector<ByteRange> ranges);

/*! \brief Complement of a normalized range set over 0x00-0xFF. */
std::vector<ByteRange> ComplementRanges(const std::vector<ByteRange>& ranges);

/*! \brief Deep-copying owning pointer, so recursive expression trees keep value semantics. */
template <typename T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  const T& operator*() const { return *ptr_; }
  T& operator*() { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }
  T* operator->() { return ptr_.get(); }
  bool operator==(const Box& other) const { return *ptr_ == *other.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

struct RuleExpr;

struct ByteClassExpr {
  std::vector<ByteRange> ranges;
  bool negated = false;
  bool operator==(const ByteClassExpr&) const = default;
};
struct LiteralExpr {
  std::string bytes;
  bool operator==(const LiteralExpr&) const = default;
};
struct SequenceExpr {
  std::vector<RuleExpr> items;
  bool operator==(const SequenceExpr&) const;
};
struct ChoiceExpr {
  std::vector<RuleExpr> items;
  bool operator==(const ChoiceExpr&) const;
};
struct RepeatExpr {
  Box<RuleExpr> body;
  int32_t min = 0;
  std::optional<int32_t> max;  // nullopt = unbounded
  bool operator==(const RepeatExpr&) const = default;
};
struct RuleRefExpr {
  int32_t rule_id;
  bool operator==(const RuleRefExpr&) const = default;
};
struct EmptyExpr {
  bool operator==(const EmptyExpr&) const = default;
};

struct RuleExpr {
  std::variant<ByteClassExpr, LiteralExpr, SequenceExpr, ChoiceExpr, RepeatExpr, RuleRefExpr,
               EmptyExpr>
      node;

  template <typename T>
  bool Is() const {
    return std::holds_alternative<T>(node);
  }
  template <typename T>
  const T& As() const {
    return std::get<T>(node);
  }
  bool operator==(const RuleExpr&) const = default;
};

inline bool SequenceExpr::operator==(const SequenceExpr& o) const { return items == o.items; }
inline bool ChoiceExpr::operator==(const ChoiceExpr& o) const { return items == o.items; }

RuleExpr MakeByteClass(std::vector<ByteRange> ranges, bool negated = false);
RuleExpr MakeLiteral(std::string bytes);
RuleExpr MakeSequence(std::vector<RuleExpr> items);
RuleExpr MakeChoice(std::vector<RuleExpr> items);
RuleExpr MakeRepeat(RuleExpr body, int32_t min, std::optional<int32_t> max);
RuleExpr MakeRuleRef(int32_t rule_id);
RuleExpr MakeEmpty();

struct Rule {
  std::string name;
  RuleExpr body;
  bool operator==(const Rule&) const = default;
};

/*!
 * \brief A validated grammar. Every rule reference resolves, names are unique, every rule can
 * derive at least one string, and no rule is left-recursive.
 */
class Grammar {
 public:
  Grammar() = default;
  Grammar(std::vector<Rule> rules, int32_t root_rule);

  const std::vector<Rule>& rules() const { return rules_; }
  const Rule& rule(int32_t id) const { return rules_[id]; }
  int32_t num_rules() const { return static_cast<int32_t>(rules_.size()); }
  int32_t root_rule() const { return root_rule_; }

  /*! \brief Rule id for `name`, or -1. */
  int32_t FindRule(std::string_view name) const;

  bool operator==(const Grammar&) const = default;

 private:
  std::vector<Rule> rules_;
  int32_t root_rule_ = 0;
};

/*!
 * \brief Parse grammar text. The rule named `root` is the root rule, or the first rule when no
 * rule has that name.
 * \throws GrammarError with line/column for syntax errors, undefined references, duplicate
 * names, an empty grammar, rules with an empty language, and left recursion.
 */
Grammar ParseGrammar(std::string_view text);

/*! \brief Flatten nested sequences/choices, drop empties, canonicalize repeats, expand negated
 * byte classes. Language-preserving and idempotent. */
Grammar NormalizeGrammar(const Grammar& grammar);

/*! \brief Emit grammar text that ParseGrammar reads back into a structurally equal grammar. */
std::string PrintGrammar(const Grammar& grammar);
std::string PrintExpr(const Grammar& grammar, const RuleExpr& expr);

/*! \brief Runs the structural checks ParseGrammar performs. Throws GrammarError. */
void ValidateGrammar(const Grammar& grammar);

}  // namespace gmask

#endif  // GMASK_GRAMMAR_H_
