/*!
 *  Copyright (c) 2026 by Contributors
 * \file grammar.cc
 * \brief Grammar construction helpers and structural validation.
 */
#include <algorithm>
#include <unordered_set>

#include "gmask/error.h"
#include "gmask/grammar.h"

namespace gmask {

std::vector<ByteRange> NormalizeRanges(std::vector<ByteRange> ranges) {
  std::sort(ranges.begin(), ranges.end());
  std::vector<ByteRange> out;
  for (const auto& r : ranges) {
    if (!out.empty() && static_cast<int>(r.lo) <= static_cast<int>(out.back().hi) + 1) {
      out.back().hi = std::max(out.back().hi, r.hi);
    } else {
      out.push_back(r);
    }
  }
  return out;
}

std::vector<ByteRange> ComplementRanges(const std::vector<ByteRange>& ranges) {
  std::vector<ByteRange> out;
  int next = 0;
  for (const auto& r : ranges) {
    if (r.lo > next) out.push_back({static_cast<uint8_t>(next), static_cast<uint8_t>(r.lo - 1)});
    next = r.hi + 1;
  }
  if (next <= 0xFF) out.push_back({static_cast<uint8_t>(next), 0xFF});
  return out;
}

RuleExpr MakeByteClass(std::vector<ByteRange> ranges, bool negated) {
  return RuleExpr{ByteClassExpr{std::move(ranges), negated}};
}
RuleExpr MakeLiteral(std::string bytes) { return RuleExpr{LiteralExpr{std::move(bytes)}}; }
RuleExpr MakeSequence(std::vector<RuleExpr> items) {
  return RuleExpr{SequenceExpr{std::move(items)}};
}
RuleExpr MakeChoice(std::vector<RuleExpr> items) { return RuleExpr{ChoiceExpr{std::move(items)}}; }
RuleExpr MakeRepeat(RuleExpr body, int32_t min, std::optional<int32_t> max) {
  return RuleExpr{RepeatExpr{Box<RuleExpr>(std::move(body)), min, max}};
}
RuleExpr MakeRuleRef(int32_t rule_id) { return RuleExpr{RuleRefExpr{rule_id}}; }
RuleExpr MakeEmpty() { return RuleExpr{EmptyExpr{}}; }

Grammar::Grammar(std::vector<Rule> rules, int32_t root_rule)
    : rules_(std::move(rules)), root_rule_(root_rule) {}

int32_t Grammar::FindRule(std::string_view name) const {
  for (size_t i = 0; i < rules_.size(); ++i) {
    if (rules_[i].name == name) return static_cast<int32_t>(i);
  }
  return -1;
}

namespace {

// Evaluates a monotone boolean property bottom-up given the current per-rule values.
template <typename RefFn>
bool Productive(const RuleExpr& e, const RefFn& rule_value) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ByteClassExpr>) {
          return n.negated ? !ComplementRanges(NormalizeRanges(n.ranges)).empty()
                           : !n.ranges.empty();
        } else if constexpr (std::is_same_v<T, LiteralExpr> || std::is_same_v<T, EmptyExpr>) {
          return true;
        } else if constexpr (std::is_same_v<T, SequenceExpr>) {
          return std::all_of(n.items.begin(), n.items.end(),
                             [&](const RuleExpr& x) { return Productive(x, rule_value); });
        } else if constexpr (std::is_same_v<T, ChoiceExpr>) {
          return std::any_of(n.items.begin(), n.items.end(),
                             [&](const RuleExpr& x) { return Productive(x, rule_value); });
        } else if constexpr (std::is_same_v<T, RepeatExpr>) {
          return n.min == 0 || Productive(*n.body, rule_value);
        } else {
          return rule_value(n.rule_id);
        }
      },
      e.node);
}

template <typename RefFn>
bool Nullable(const RuleExpr& e, const RefFn& rule_value) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ByteClassExpr>) {
          return false;
        } else if constexpr (std::is_same_v<T, LiteralExpr>) {
          return n.bytes.empty();
        } else if constexpr (std::is_same_v<T, EmptyExpr>) {
          return true;
        } else if constexpr (std::is_same_v<T, SequenceExpr>) {
          return std::all_of(n.items.begin(), n.items.end(),
                             [&](const RuleExpr& x) { return Nullable(x, rule_value); });
        } else if constexpr (std::is_same_v<T, ChoiceExpr>) {
          return std::any_of(n.items.begin(), n.items.end(),
                             [&](const RuleExpr& x) { return Nullable(x, rule_value); });
        } else if constexpr (std::is_same_v<T, RepeatExpr>) {
          return n.min == 0 || Nullable(*n.body, rule_value);
        } else {
          return rule_value(n.rule_id);
        }
      },
      e.node);
}

// Collects rules that can be entered before any byte is consumed by `e`.
void LeftRefs(const RuleExpr& e, const std::vector<bool>& nullable, std::unordered_set<int>* out) {
  auto nullable_fn = [&](int32_t id) { return static_cast<bool>(nullable[id]); };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SequenceExpr>) {
          for (const auto& item : n.items) {
            LeftRefs(item, nullable, out);
            if (!Nullable(item, nullable_fn)) break;
          }
        } else if constexpr (std::is_same_v<T, ChoiceExpr>) {
          for (const auto& item : n.items) LeftRefs(item, nullable, out);
        } else if constexpr (std::is_same_v<T, RepeatExpr>) {
          if (!n.max || *n.max > 0) LeftRefs(*n.body, nullable, out);
        } else if constexpr (std::is_same_v<T, RuleRefExpr>) {
          out->insert(n.rule_id);
        }
      },
      e.node);
}

void CheckStructure(const Grammar& g, const RuleExpr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SequenceExpr> || std::is_same_v<T, ChoiceExpr>) {
          for (const auto& item : n.items) CheckStructure(g, item);
        } else if constexpr (std::is_same_v<T, RepeatExpr>) {
          if (n.min < 0 || (n.max && *n.max < n.min)) {
            throw GrammarError("invalid repetition bounds");
          }
          CheckStructure(g, *n.body);
        } else if constexpr (std::is_same_v<T, RuleRefExpr>) {
          if (n.rule_id < 0 || n.rule_id >= g.num_rules()) {
            throw GrammarError("undefined rule reference #" + std::to_string(n.rule_id));
          }
        } else if constexpr (std::is_same_v<T, ByteClassExpr>) {
          for (const auto& r : n.ranges) {
            if (r.lo > r.hi) throw GrammarError("byte range out of order");
          }
        }
      },
      e.node);
}

}  // namespace

void ValidateGrammar(const Grammar& g) {
  int n = g.num_rules();
  if (n == 0) throw GrammarError("empty grammar: no rules defined");
  if (g.root_rule() < 0 || g.root_rule() >= n) throw GrammarError("root rule out of range");
  std::unordered_set<std::string> names;
  for (const auto& rule : g.rules()) {
    if (!names.insert(rule.name).second) {
      throw GrammarError("duplicate rule name '" + rule.name + "'");
    }
    CheckStructure(g, rule.body);
  }

  std::vector<bool> productive(n, false);
  for (bool changed = true; changed;) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      if (!productive[i] &&
          Productive(g.rule(i).body, [&](int32_t id) { return static_cast<bool>(productive[id]); })) {
        productive[i] = true;
        changed = true;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!productive[i]) {
      throw GrammarError("rule '" + g.rule(i).name + "' cannot derive any finite string");
    }
  }

  std::vector<bool> nullable(n, false);
  for (bool changed = true; changed;) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      if (!nullable[i] &&
          Nullable(g.rule(i).body, [&](int32_t id) { return static_cast<bool>(nullable[id]); })) {
        nullable[i] = true;
        changed = true;
      }
    }
  }

  // A cycle in the "enters before consuming a byte" relation is left recursion.
  std::vector<std::vector<int>> left(n);
  for (int i = 0; i < n; ++i) {
    std::unordered_set<int> refs;
    LeftRefs(g.rule(i).body, nullable, &refs);
    left[i].assign(refs.begin(), refs.end());
    std::sort(left[i].begin(), left[i].end());
  }
  std::vector<int> color(n, 0);
  std::vector<std::pair<int, size_t>> stack;
  for (int s = 0; s < n; ++s) {
    if (color[s] != 0) continue;
    stack.push_back({s, 0});
    color[s] = 1;
    while (!stack.empty()) {
      auto& [u, k] = stack.back();
      if (k < left[u].size()) {
        int v = left[u][k++];
        if (color[v] == 1) {
          throw GrammarError("left recursion through rule '" + g.rule(v).name + "'");
        }
        if (color[v] == 0) {
          color[v] = 1;
          stack.push_back({v, 0});
        }
      } else {
        color[u] = 2;
        stack.pop_back();
      }
    }
  }
}

}  // namespace gmask
