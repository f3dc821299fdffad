/*!
 *  Copyright (c) 2026 by Contributors
 * \file context_expansion.cc
 * \brief Token classification at a single node and the suffix automaton used to refine it.
 */
#include <algorithm>
#include <memory>

#include "gmask/mask_cache.h"
#include "stack_engine.h"

namespace gmask {

const char* TokenClassName(TokenClass c) {
  switch (c) {
    case TokenClass::kAccepted:
      return "accepted";
    case TokenClass::kRejected:
      return "rejected";
    case TokenClass::kDependent:
      return "dependent";
  }
  return "?";
}

ClassifyResult ClassifyToken(const Pda& pda, int32_t node, std::string_view token) {
  StackEngine engine(std::make_shared<FlatPda>(pda), nullptr);
  PrefixWalker walker(&engine);
  StackTop start{node, kBottomFrame};
  walker.Reset(std::span<const StackTop>(&start, 1));
  walker.Walk(token, 0);
  ClassifyResult result;
  result.cls = TokenClass::kRejected;
  if (token.empty()) return result;
  if (walker.AcceptedAt(token.size())) {
    result.cls = TokenClass::kAccepted;
    return result;
  }
  if (IsOutermostNode(pda, node)) return result;
  for (size_t j = 1; j < token.size(); ++j) {
    if (walker.bottom_popped(j)) result.pop_offsets.push_back(static_cast<int32_t>(j));
  }
  if (!result.pop_offsets.empty()) result.cls = TokenClass::kDependent;
  return result;
}

bool IsOutermostNode(const Pda& pda, int32_t node) {
  if (pda.node(node).rule != pda.root_rule()) return false;
  for (const auto& e : pda.edges()) {
    if (e.kind == EdgeKind::kRuleRef && e.rule_ref == pda.root_rule()) return false;
  }
  return true;
}

ContextExpansion::ContextExpansion(const Pda& pda) : pda_(&pda) {
  int32_t num_rules = pda.num_rules();
  starts_.assign(num_rules, {});
  for (const auto& e : pda.edges()) {
    if (e.kind == EdgeKind::kRuleRef) starts_[e.rule_ref].push_back(e.dst);
  }
  for (auto& s : starts_) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  mode_.assign(num_rules, Mode::kSuffix);
  for (int32_t r = 0; r < num_rules; ++r) {
    if (starts_[r].empty()) mode_[r] = r == pda.root_rule() ? Mode::kEndsOutput : Mode::kUnknown;
  }
  bool root_ends = mode_[pda.root_rule()] == Mode::kEndsOutput;
  stop_.assign(pda.num_nodes(), 0);
  for (int32_t n = 0; n < pda.num_nodes(); ++n) {
    const PdaNode& nd = pda.node(n);
    bool stop = nd.final && !(root_ends && nd.rule == pda.root_rule());
    for (const auto& e : pda.OutEdges(n)) {
      if (e.kind == EdgeKind::kRuleRef) stop = true;
    }
    stop_[n] = stop ? 1 : 0;
  }
}

bool ContextExpansion::Admits(int32_t rule, std::string_view rest) const {
  if (mode_[rule] == Mode::kUnknown) return true;
  if (mode_[rule] == Mode::kEndsOutput) return rest.empty();
  const Pda& pda = *pda_;
  std::vector<uint8_t> in_set(pda.num_nodes(), 0);
  std::vector<int32_t> cur;
  // Adds `n` and its epsilon closure; returns true if an accepting node was reached.
  auto add = [&](int32_t n, std::vector<int32_t>* set) {
    std::vector<int32_t> work{n};
    if (in_set[n]) return false;
    in_set[n] = 1;
    set->push_back(n);
    bool hit = false;
    while (!work.empty()) {
      int32_t u = work.back();
      work.pop_back();
      if (stop_[u]) hit = true;
      for (const auto& e : pda.OutEdges(u)) {
        if (e.kind == EdgeKind::kEpsilon && !in_set[e.dst]) {
          in_set[e.dst] = 1;
          set->push_back(e.dst);
          work.push_back(e.dst);
        }
      }
    }
    return hit;
  };
  for (int32_t s : starts_[rule]) {
    if (add(s, &cur)) return true;
  }
  for (char ch : rest) {
    uint8_t b = static_cast<uint8_t>(ch);
    for (int32_t n : cur) in_set[n] = 0;
    std::vector<int32_t> next;
    for (int32_t n : cur) {
      for (const auto& e : pda.OutEdges(n)) {
        if (e.kind == EdgeKind::kChar && e.bytes.Test(b)) {
          if (add(e.dst, &next)) return true;
        }
      }
    }
    if (next.empty()) return false;
    cur.swap(next);
  }
  return !cur.empty();
}

TokenClass RefineDependent(const Pda& pda, const ContextExpansion& ctx, int32_t node,
                           std::string_view token, const ClassifyResult& result) {
  if (result.cls != TokenClass::kDependent) return result.cls;
  int32_t rule = pda.node(node).rule;
  for (int32_t j : result.pop_offsets) {
    if (ctx.Admits(rule, token.substr(j))) return TokenClass::kDependent;
  }
  return TokenClass::kRejected;
}

}  // namespace gmask
