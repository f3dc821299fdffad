/*!
 *  Copyright (c) 2026 by Contributors
 * \file pda_graph.h
 * \brief Mutable automaton graph used while constructing and rewriting a Pda.
 */
#ifndef GMASK_SRC_PDA_GRAPH_H_
#define GMASK_SRC_PDA_GRAPH_H_

#include <vector>

#include "gmask/pda.h"

namespace gmask {

/*!
 * \brief Nodes and edges are never physically removed, only marked dead, so ids stay stable while
 * passes run. ToPda() compacts the live part and drops nodes unreachable from their rule start
 * or unable to reach one of its final nodes.
 */
class MutableGraph {
 public:
  struct Node {
    int32_t rule;
    bool final = false;
    bool alive = true;
    std::vector<int32_t> in;
    std::vector<int32_t> out;
  };
  struct Edge {
    int32_t src;
    int32_t dst;
    EdgeKind kind;
    int32_t rule_ref = -1;
    std::vector<ByteRange> ranges;
    bool alive = true;

    bool SameLabel(const Edge& o) const {
      return kind == o.kind && rule_ref == o.rule_ref && ranges == o.ranges;
    }
  };

  MutableGraph() = default;
  static MutableGraph FromPda(const Pda& pda);

  int32_t AddNode(int32_t rule, bool final = false);
  int32_t AddEdge(int32_t src, int32_t dst, EdgeKind kind, int32_t rule_ref = -1,
                  std::vector<ByteRange> ranges = {});
  void RemoveEdge(int32_t e);
  void SetSrc(int32_t e, int32_t src);
  void SetDst(int32_t e, int32_t dst);
  /*! \brief Move every edge of `drop` onto `keep`, OR the final flags, and kill `drop`. A rule
   * start moves to `keep` as well. */
  void MergeInto(int32_t keep, int32_t drop);
  bool IsRuleStart(int32_t n) const { return rules[nodes[n].rule].start == n; }
  /*! \brief Remove parallel edges with equal labels. Returns true if any were removed. */
  bool DedupeEdges(int32_t n);

  Pda ToPda() const;

  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<PdaRule> rules;
  int32_t root_rule = 0;
};

}  // namespace gmask

#endif  // GMASK_SRC_PDA_GRAPH_H_
