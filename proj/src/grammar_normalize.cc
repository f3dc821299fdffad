/*!
 *  Copyright (c) 2026 by Contributors
 * \file grammar_normalize.cc
 * \brief Structural normalization of grammar expressions.
 */
#include "gmask/grammar.h"

namespace gmask {

namespace {

bool IsStar(const RuleExpr& e) {
  if (!e.Is<RepeatExpr>()) return false;
  const auto& r = e.As<RepeatExpr>();
  return r.min == 0 && !r.max;
}

RuleExpr Normalize(const RuleExpr& e) {
  return std::visit(
      [&](const auto& n) -> RuleExpr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ByteClassExpr>) {
          auto ranges = NormalizeRanges(n.ranges);
          if (n.negated) ranges = ComplementRanges(ranges);
          return MakeByteClass(std::move(ranges));
        } else if constexpr (std::is_same_v<T, LiteralExpr>) {
          if (n.bytes.empty()) return MakeEmpty();
          return MakeLiteral(n.bytes);
        } else if constexpr (std::is_same_v<T, SequenceExpr>) {
          std::vector<RuleExpr> items;
          for (const auto& item : n.items) {
            RuleExpr x = Normalize(item);
            if (x.Is<EmptyExpr>()) continue;
            if (x.Is<SequenceExpr>()) {
              for (const auto& y : x.As<SequenceExpr>().items) items.push_back(y);
            } else {
              items.push_back(std::move(x));
            }
          }
          if (items.empty()) return MakeEmpty();
          if (items.size() == 1) return std::move(items[0]);
          return MakeSequence(std::move(items));
        } else if constexpr (std::is_same_v<T, ChoiceExpr>) {
          std::vector<RuleExpr> items;
          for (const auto& item : n.items) {
            RuleExpr x = Normalize(item);
            if (x.Is<ChoiceExpr>()) {
              for (const auto& y : x.As<ChoiceExpr>().items) items.push_back(y);
            } else {
              items.push_back(std::move(x));
            }
          }
          if (items.size() == 1) return std::move(items[0]);
          return MakeChoice(std::move(items));
        } else if constexpr (std::is_same_v<T, RepeatExpr>) {
          RuleExpr body = Normalize(*n.body);
          if (body.Is<EmptyExpr>() || (n.max && *n.max == 0)) return MakeEmpty();
          if (n.min == 1 && n.max && *n.max == 1) return body;
          // (x*)* , (x*)+ , (x*){m,n} with n >= 1 all denote x*.
          if (IsStar(body)) return body;
          if (n.min == 0 && !n.max && body.Is<RepeatExpr>()) {
            const auto& inner = body.As<RepeatExpr>();
            if (inner.min <= 1 && !inner.max) return MakeRepeat(*inner.body, 0, std::nullopt);
          }
          return MakeRepeat(std::move(body), n.min, n.max);
        } else {
          return RuleExpr{n};
        }
      },
      e.node);
}

}  // namespace

Grammar NormalizeGrammar(const Grammar& grammar) {
  std::vector<Rule> rules;
  rules.reserve(grammar.num_rules());
  for (const auto& rule : grammar.rules()) rules.push_back(Rule{rule.name, Normalize(rule.body)});
  return Grammar(std::move(rules), grammar.root_rule());
}

}  // namespace gmask
