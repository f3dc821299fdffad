/*!
 *  Copyright (c) 2026 by Contributors
 * \file pda_optimize.cc
 * \brief Rule inlining and node merging passes.
 */
#include <map>

#include "gmask/pda.h"
#include "pda_graph.h"

namespace gmask {

namespace {

bool RemoveEpsilonSelfLoops(MutableGraph* g) {
  bool changed = false;
  for (int32_t e = 0; e < static_cast<int32_t>(g->edges.size()); ++e) {
    const auto& edge = g->edges[e];
    if (edge.alive && edge.kind == EdgeKind::kEpsilon && edge.src == edge.dst) {
      g->RemoveEdge(e);
      changed = true;
    }
  }
  return changed;
}

// Contracts epsilon edges s->t where t is only reachable through s, or s can only leave to t.
bool ContractEpsilons(MutableGraph* g) {
  bool changed = false;
  for (int32_t e = 0; e < static_cast<int32_t>(g->edges.size()); ++e) {
    const auto& edge = g->edges[e];
    if (!edge.alive || edge.kind != EdgeKind::kEpsilon || edge.src == edge.dst) continue;
    int32_t s = edge.src, t = edge.dst;
    if (g->nodes[t].in.size() == 1 && !g->IsRuleStart(t)) {
      g->RemoveEdge(e);
      g->MergeInto(s, t);
      changed = true;
    } else if (g->nodes[s].out.size() == 1 && (!g->nodes[s].final || g->nodes[t].final)) {
      g->RemoveEdge(e);
      g->MergeInto(t, s);
      changed = true;
    }
  }
  return changed;
}

// Merges targets of equally-labeled edges from one node when each target has no other inbound
// edge, so they are indistinguishable entry points.
bool MergeSiblings(MutableGraph* g) {
  bool changed = false;
  for (int32_t u = 0; u < static_cast<int32_t>(g->nodes.size()); ++u) {
    if (!g->nodes[u].alive) continue;
    std::vector<int32_t> outs = g->nodes[u].out;
    std::vector<bool> used(outs.size(), false);
    for (size_t i = 0; i < outs.size(); ++i) {
      if (used[i]) continue;
      const auto& a = g->edges[outs[i]];
      int32_t v1 = a.dst;
      if (!a.alive || v1 == u || g->nodes[v1].in.size() != 1 || g->IsRuleStart(v1)) continue;
      for (size_t j = i + 1; j < outs.size(); ++j) {
        if (used[j]) continue;
        const auto& b = g->edges[outs[j]];
        int32_t v2 = b.dst;
        if (!b.alive || !a.SameLabel(b) || v2 == u || v2 == v1) continue;
        if (g->nodes[v2].in.size() != 1 || g->IsRuleStart(v2)) continue;
        used[j] = true;
        g->MergeInto(v1, v2);
        changed = true;
      }
    }
    if (changed) g->DedupeEdges(u);
  }
  return changed;
}

}  // namespace

Pda MergeNodes(const Pda& pda) {
  MutableGraph g = MutableGraph::FromPda(pda);
  for (int32_t n = 0; n < static_cast<int32_t>(g.nodes.size()); ++n) g.DedupeEdges(n);
  bool changed = true;
  while (changed) {
    changed = false;
    changed |= RemoveEpsilonSelfLoops(&g);
    changed |= ContractEpsilons(&g);
    changed |= MergeSiblings(&g);
    for (int32_t n = 0; n < static_cast<int32_t>(g.nodes.size()); ++n) {
      if (g.nodes[n].alive) changed |= g.DedupeEdges(n);
    }
  }
  return g.ToPda();
}

Pda InlineRules(const Pda& pda, int max_rule_size, int max_result_size) {
  MutableGraph g = MutableGraph::FromPda(pda);
  int32_t num_rules = static_cast<int32_t>(g.rules.size());
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::vector<int32_t>> rule_nodes(num_rules);
    std::vector<bool> has_refs(num_rules, false);
    for (int32_t n = 0; n < static_cast<int32_t>(g.nodes.size()); ++n) {
      if (!g.nodes[n].alive) continue;
      rule_nodes[g.nodes[n].rule].push_back(n);
    }
    for (const auto& e : g.edges) {
      if (e.alive && e.kind == EdgeKind::kRuleRef) has_refs[g.nodes[e.src].rule] = true;
    }
    std::vector<int64_t> size(num_rules);
    for (int32_t r = 0; r < num_rules; ++r) size[r] = static_cast<int64_t>(rule_nodes[r].size());
    auto inlinable = [&](int32_t r) {
      return r != g.root_rule && !has_refs[r] && size[r] <= max_rule_size;
    };

    int32_t num_edges = static_cast<int32_t>(g.edges.size());
    for (int32_t e = 0; e < num_edges; ++e) {
      const auto edge = g.edges[e];
      if (!edge.alive || edge.kind != EdgeKind::kRuleRef) continue;
      int32_t child = edge.rule_ref;
      int32_t parent = g.nodes[edge.src].rule;
      if (child == parent || !inlinable(child)) continue;
      if (size[parent] + size[child] > max_result_size) continue;

      std::map<int32_t, int32_t> copy;
      for (int32_t n : rule_nodes[child]) copy[n] = g.AddNode(parent);
      for (int32_t n : rule_nodes[child]) {
        std::vector<int32_t> outs = g.nodes[n].out;
        for (int32_t ce : outs) {
          const auto child_edge = g.edges[ce];
          g.AddEdge(copy[n], copy[child_edge.dst], child_edge.kind, child_edge.rule_ref,
                    child_edge.ranges);
        }
      }
      g.AddEdge(edge.src, copy[g.rules[child].start], EdgeKind::kEpsilon);
      for (int32_t n : rule_nodes[child]) {
        if (g.nodes[n].final) g.AddEdge(copy[n], edge.dst, EdgeKind::kEpsilon);
      }
      g.RemoveEdge(e);
      size[parent] += size[child];
      changed = true;
    }
  }
  return g.ToPda();
}

}  // namespace gmask
