/*!
 *  Copyright (c) 2026 by Contributors
 * \file pda_builder.cc
 * \brief Mutable graph helpers and the Thompson-style construction of per-rule automata.
 */
#include <algorithm>
#include <deque>

#include "gmask/error.h"
#include "pda_graph.h"

namespace gmask {

MutableGraph MutableGraph::FromPda(const Pda& pda) {
  MutableGraph g;
  g.rules = pda.rules();
  g.root_rule = pda.root_rule();
  for (const auto& n : pda.nodes()) g.AddNode(n.rule, n.final);
  for (const auto& e : pda.edges()) g.AddEdge(e.src, e.dst, e.kind, e.rule_ref, e.ranges);
  return g;
}

int32_t MutableGraph::AddNode(int32_t rule, bool final) {
  Node n;
  n.rule = rule;
  n.final = final;
  nodes.push_back(std::move(n));
  return static_cast<int32_t>(nodes.size()) - 1;
}

int32_t MutableGraph::AddEdge(int32_t src, int32_t dst, EdgeKind kind, int32_t rule_ref,
                              std::vector<ByteRange> ranges) {
  int32_t id = static_cast<int32_t>(edges.size());
  edges.push_back(Edge{src, dst, kind, rule_ref, std::move(ranges), true});
  nodes[src].out.push_back(id);
  nodes[dst].in.push_back(id);
  return id;
}

namespace {
void EraseValue(std::vector<int32_t>* v, int32_t x) {
  auto it = std::find(v->begin(), v->end(), x);
  if (it != v->end()) v->erase(it);
}
}  // namespace

void MutableGraph::RemoveEdge(int32_t e) {
  Edge& edge = edges[e];
  if (!edge.alive) return;
  edge.alive = false;
  EraseValue(&nodes[edge.src].out, e);
  EraseValue(&nodes[edge.dst].in, e);
}

void MutableGraph::SetSrc(int32_t e, int32_t src) {
  EraseValue(&nodes[edges[e].src].out, e);
  edges[e].src = src;
  nodes[src].out.push_back(e);
}

void MutableGraph::SetDst(int32_t e, int32_t dst) {
  EraseValue(&nodes[edges[e].dst].in, e);
  edges[e].dst = dst;
  nodes[dst].in.push_back(e);
}

void MutableGraph::MergeInto(int32_t keep, int32_t drop) {
  if (keep == drop) return;
  std::vector<int32_t> outs = nodes[drop].out;
  for (int32_t e : outs) SetSrc(e, keep);
  std::vector<int32_t> ins = nodes[drop].in;
  for (int32_t e : ins) SetDst(e, keep);
  nodes[keep].final = nodes[keep].final || nodes[drop].final;
  nodes[drop].alive = false;
  nodes[drop].final = false;
  auto& start = rules[nodes[drop].rule].start;
  if (start == drop) start = keep;
}

bool MutableGraph::DedupeEdges(int32_t n) {
  bool removed = false;
  std::vector<int32_t> outs = nodes[n].out;
  for (size_t i = 0; i < outs.size(); ++i) {
    if (!edges[outs[i]].alive) continue;
    for (size_t j = i + 1; j < outs.size(); ++j) {
      const Edge& a = edges[outs[i]];
      const Edge& b = edges[outs[j]];
      if (b.alive && a.dst == b.dst && a.SameLabel(b)) {
        RemoveEdge(outs[j]);
        removed = true;
      }
    }
  }
  return removed;
}

Pda MutableGraph::ToPda() const {
  int32_t n = static_cast<int32_t>(nodes.size());
  std::vector<bool> keep(n, false);
  for (const auto& rule : rules) {
    std::deque<int32_t> queue{rule.start};
    keep[rule.start] = true;
    while (!queue.empty()) {
      int32_t u = queue.front();
      queue.pop_front();
      for (int32_t e : nodes[u].out) {
        int32_t v = edges[e].dst;
        if (!keep[v]) {
          keep[v] = true;
          queue.push_back(v);
        }
      }
    }
  }
  // A node that cannot reach a final node of its rule is a dead end for every stack through it.
  std::vector<bool> live(n, false);
  std::deque<int32_t> back;
  for (int32_t i = 0; i < n; ++i) {
    if (nodes[i].alive && nodes[i].final) {
      live[i] = true;
      back.push_back(i);
    }
  }
  while (!back.empty()) {
    int32_t v = back.front();
    back.pop_front();
    for (int32_t e : nodes[v].in) {
      int32_t u = edges[e].src;
      if (edges[e].alive && !live[u]) {
        live[u] = true;
        back.push_back(u);
      }
    }
  }
  std::vector<int32_t> order;
  for (int32_t i = 0; i < n; ++i) {
    if (keep[i] && live[i] && nodes[i].alive) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int32_t a, int32_t b) { return nodes[a].rule < nodes[b].rule; });
  std::vector<int32_t> remap(n, -1);
  std::vector<PdaNode> out_nodes;
  for (int32_t old : order) {
    remap[old] = static_cast<int32_t>(out_nodes.size());
    out_nodes.push_back(PdaNode{nodes[old].rule, nodes[old].final});
  }
  std::vector<PdaEdge> out_edges;
  for (const auto& e : edges) {
    if (!e.alive || remap[e.src] < 0 || remap[e.dst] < 0) continue;
    PdaEdge pe;
    pe.src = remap[e.src];
    pe.dst = remap[e.dst];
    pe.kind = e.kind;
    pe.rule_ref = e.rule_ref;
    pe.ranges = e.ranges;
    out_edges.push_back(std::move(pe));
  }
  std::sort(out_edges.begin(), out_edges.end(), [](const PdaEdge& a, const PdaEdge& b) {
    return std::tie(a.src, a.kind, a.rule_ref, a.dst, a.ranges) <
           std::tie(b.src, b.kind, b.rule_ref, b.dst, b.ranges);
  });
  out_edges.erase(std::unique(out_edges.begin(), out_edges.end()), out_edges.end());
  std::vector<PdaRule> out_rules = rules;
  for (auto& r : out_rules) {
    GMASK_CHECK(remap[r.start] >= 0) << "rule '" << r.name << "' derives no finite string";
    r.start = remap[r.start];
  }
  return Pda(std::move(out_nodes), std::move(out_edges), std::move(out_rules), root_rule);
}

namespace {

class ThompsonBuilder {
 public:
  struct Frag {
    int32_t start;
    int32_t end;
  };

  ThompsonBuilder(MutableGraph* g, int32_t rule) : g_(g), rule_(rule) {}

  Frag Build(const RuleExpr& e) {
    return std::visit(
        [&](const auto& n) -> Frag {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, ByteClassExpr>) {
            auto ranges = NormalizeRanges(n.ranges);
            if (n.negated) ranges = ComplementRanges(ranges);
            Frag f{NewNode(), NewNode()};
            if (!ranges.empty()) g_->AddEdge(f.start, f.end, EdgeKind::kChar, -1, ranges);
            return f;
          } else if constexpr (std::is_same_v<T, LiteralExpr>) {
            int32_t start = NewNode();
            int32_t cur = start;
            for (char c : n.bytes) {
              int32_t next = NewNode();
              uint8_t b = static_cast<uint8_t>(c);
              g_->AddEdge(cur, next, EdgeKind::kChar, -1, {ByteRange{b, b}});
              cur = next;
            }
            return {start, cur};
          } else if constexpr (std::is_same_v<T, EmptyExpr>) {
            int32_t s = NewNode();
            return {s, s};
          } else if constexpr (std::is_same_v<T, RuleRefExpr>) {
            Frag f{NewNode(), NewNode()};
            g_->AddEdge(f.start, f.end, EdgeKind::kRuleRef, n.rule_id);
            return f;
          } else if constexpr (std::is_same_v<T, SequenceExpr>) {
            if (n.items.empty()) return Build(MakeEmpty());
            Frag f = Build(n.items[0]);
            for (size_t i = 1; i < n.items.size(); ++i) f = Concat(f, Build(n.items[i]));
            return f;
          } else if constexpr (std::is_same_v<T, ChoiceExpr>) {
            Frag f{NewNode(), NewNode()};
            for (const auto& item : n.items) {
              Frag a = Build(item);
              g_->AddEdge(f.start, a.start, EdgeKind::kEpsilon);
              g_->AddEdge(a.end, f.end, EdgeKind::kEpsilon);
            }
            return f;
          } else {
            return BuildRepeat(*n.body, n.min, n.max);
          }
        },
        e.node);
  }

 private:
  int32_t NewNode() { return g_->AddNode(rule_); }

  // Joins two fragments by identifying a.end with b.start when that cannot create new paths:
  // either a.end has no outgoing edges or b.start has no incoming edges.
  Frag Concat(Frag a, Frag b) {
    if (g_->nodes[a.end].out.empty()) {
      g_->MergeInto(b.start, a.end);
      return {a.start == a.end ? b.start : a.start, b.end};
    }
    if (g_->nodes[b.start].in.empty()) {
      g_->MergeInto(a.end, b.start);
      return {a.start, b.start == b.end ? a.end : b.end};
    }
    g_->AddEdge(a.end, b.start, EdgeKind::kEpsilon);
    return {a.start, b.end};
  }

  Frag Star(const RuleExpr& body) {
    Frag x = Build(body);
    if (x.start != x.end && g_->nodes[x.start].in.empty() && g_->nodes[x.end].out.empty()) {
      g_->MergeInto(x.start, x.end);
      return {x.start, x.start};
    }
    int32_t q = NewNode();
    g_->AddEdge(q, x.start, EdgeKind::kEpsilon);
    g_->AddEdge(x.end, q, EdgeKind::kEpsilon);
    return {q, q};
  }

  Frag Plus(const RuleExpr& body) {
    Frag x = Build(body);
    if (x.start != x.end) g_->AddEdge(x.end, x.start, EdgeKind::kEpsilon);
    return x;
  }

  Frag Optional(Frag x) {
    Frag f{NewNode(), NewNode()};
    g_->AddEdge(f.start, x.start, EdgeKind::kEpsilon);
    g_->AddEdge(x.end, f.end, EdgeKind::kEpsilon);
    g_->AddEdge(f.start, f.end, EdgeKind::kEpsilon);
    return f;
  }

  Frag BuildRepeat(const RuleExpr& body, int32_t min, std::optional<int32_t> max) {
    if (max && *max == 0) return Build(MakeEmpty());
    if (!max) {
      if (min == 0) return Star(body);
      std::optional<Frag> f;
      for (int32_t i = 0; i + 1 < min; ++i) f = f ? Concat(*f, Build(body)) : Build(body);
      Frag tail = Plus(body);
      return f ? Concat(*f, tail) : tail;
    }
    std::optional<Frag> f;
    for (int32_t i = 0; i < min; ++i) f = f ? Concat(*f, Build(body)) : Build(body);
    int32_t extra = *max - min;
    if (extra > 0) {
      Frag tail = Optional(Build(body));
      for (int32_t i = 1; i < extra; ++i) tail = Optional(Concat(Build(body), tail));
      f = f ? Concat(*f, tail) : tail;
    }
    return *f;
  }

  MutableGraph* g_;
  int32_t rule_;
};

}  // namespace

Pda BuildPda(const Grammar& grammar) {
  MutableGraph g;
  g.root_rule = grammar.root_rule();
  g.rules.resize(grammar.num_rules());
  for (int32_t r = 0; r < grammar.num_rules(); ++r) {
    g.rules[r].name = grammar.rule(r).name;
    g.rules[r].start = -1;
  }
  for (int32_t r = 0; r < grammar.num_rules(); ++r) {
    ThompsonBuilder builder(&g, r);
    auto frag = builder.Build(grammar.rule(r).body);
    g.rules[r].start = frag.start;
    g.nodes[frag.end].final = true;
  }
  return g.ToPda();
}

Pda CompilePda(const Grammar& grammar, const PdaOptions& options) {
  Pda pda = BuildPda(NormalizeGrammar(grammar));
  if (options.merge_nodes) pda = MergeNodes(pda);
  if (options.inline_rules) {
    pda = InlineRules(pda, options.max_rule_size, options.max_result_size);
    if (options.merge_nodes) pda = MergeNodes(pda);
  }
  return pda;
}

}  // namespace gmask
