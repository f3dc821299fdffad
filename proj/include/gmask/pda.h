/*!
 *  Copyright (c) 2026 by Contributors
 * \file gmask/pda.h
 * \brief Byte-level pushdown automaton: one finite automaton per grammar rule, whose edges carry
 * byte classes, references to other rules, or epsilon.
 */
#ifndef GMASK_PDA_H_
#define GMASK_PDA_H_

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gmask/grammar.h"

namespace gmask {

/*! \brief 256-bit membership set over byte values. */
struct ByteSet {
  uint64_t words[4] = {0, 0, 0, 0};

  static ByteSet FromRanges(const std::vector<ByteRange>& ranges) {
    ByteSet s;
    for (const auto& r : ranges) {
      for (int b = r.lo; b <= r.hi; ++b) s.words[b >> 6] |= uint64_t{1} << (b & 63);
    }
    return s;
  }
  bool Test(uint8_t b) const { return (words[b >> 6] >> (b & 63)) & 1; }
  bool operator==(const ByteSet&) const = default;
};

struct PdaNode {
  int32_t rule;
  bool final;
  bool operator==(const PdaNode&) const = default;
};

enum class EdgeKind : uint8_t { kChar = 0, kRuleRef = 1, kEpsilon = 2 };

struct PdaEdge {
  int32_t src;
  int32_t dst;
  EdgeKind kind;
  /*! \brief Referenced rule for kRuleRef edges, -1 otherwise. */
  int32_t rule_ref = -1;
  /*! \brief Normalized label for kChar edges. */
  std::vector<ByteRange> ranges;
  ByteSet bytes;

  bool operator==(const PdaEdge& o) const {
    return src == o.src && dst == o.dst && kind == o.kind && rule_ref == o.rule_ref &&
           ranges == o.ranges;
  }
};

struct PdaRule {
  std::string name;
  int32_t start;
  std::vector<int32_t> finals;
  bool operator==(const PdaRule&) const = default;
};

struct PdaStats {
  int32_t num_nodes = 0;
  int32_t num_char_edges = 0;
  int32_t num_ref_edges = 0;
  int32_t num_epsilon_edges = 0;
  int32_t num_edges() const { return num_char_edges + num_ref_edges + num_epsilon_edges; }
};

/*!
 * \brief Immutable pushdown automaton. Edges are stored grouped by source node in a
 * deterministic order, so two builds from the same grammar compare equal.
 */
class Pda {
 public:
  Pda() = default;
  /*! \brief Assemble from parts; sorts edges, computes byte sets and final lists. */
  Pda(std::vector<PdaNode> nodes, std::vector<PdaEdge> edges, std::vector<PdaRule> rules,
      int32_t root_rule);

  int32_t num_nodes() const { return static_cast<int32_t>(nodes_.size()); }
  int32_t num_rules() const { return static_cast<int32_t>(rules_.size()); }
  const PdaNode& node(int32_t id) const { return nodes_[id]; }
  const std::vector<PdaNode>& nodes() const { return nodes_; }
  const std::vector<PdaEdge>& edges() const { return edges_; }
  const PdaRule& rule(int32_t id) const { return rules_[id]; }
  const std::vector<PdaRule>& rules() const { return rules_; }
  int32_t root_rule() const { return root_rule_; }
  int32_t root_start() const { return rules_[root_rule_].start; }

  std::span<const PdaEdge> OutEdges(int32_t node) const {
    return std::span<const PdaEdge>(edges_.data() + offsets_[node],
                                    offsets_[node + 1] - offsets_[node]);
  }

  /*! \brief True when the node has at least one character edge. */
  bool IsScannable(int32_t node) const;

  PdaStats Stats() const;
  std::string ToDot() const;

  void Serialize(std::string* out) const;
  static Pda Deserialize(std::string_view data, size_t* pos);

  bool operator==(const Pda& o) const {
    return nodes_ == o.nodes_ && edges_ == o.edges_ && rules_ == o.rules_ &&
           root_rule_ == o.root_rule_;
  }

 private:
  std::vector<PdaNode> nodes_;
  std::vector<PdaEdge> edges_;
  std::vector<PdaRule> rules_;
  std::vector<int32_t> offsets_;
  int32_t root_rule_ = 0;
};

/*! \brief Thompson construction over the normalized grammar. */
Pda BuildPda(const Grammar& grammar);

/*! \brief Substitute small reference-free rules into the rules that reference them. */
Pda InlineRules(const Pda& pda, int max_rule_size = 16, int max_result_size = 512);

/*! \brief Merge equivalent nodes and eliminate epsilon edges, to a fixpoint. */
Pda MergeNodes(const Pda& pda);

struct PdaOptions {
  bool inline_rules = true;
  bool merge_nodes = true;
  int max_rule_size = 16;
  int max_result_size = 512;
};

/*! \brief Normalize, build, then apply the enabled optimizations (merge, inline, merge). */
Pda CompilePda(const Grammar& grammar, const PdaOptions& options = {});

/*! \brief One parallel stack of the reference interpreter: return nodes bottom to top. */
struct OracleStack {
  int32_t node;
  std::vector<int32_t> frames;
  auto operator<=>(const OracleStack&) const = default;
};

/*!
 * \brief Straightforward interpreter used as the correctness reference. States are explicit
 * (node, frames) pairs held in ordered sets; nothing is shared with the runtime engine.
 */
class PdaOracle {
 public:
  explicit PdaOracle(const Pda& pda, size_t state_cap = 4096);

  /*! \brief Closure of the root start state. */
  std::set<OracleStack> InitialStates() const;
  /*! \brief Consume bytes from `states`; the result is closed under epsilon/push/pop moves. */
  std::set<OracleStack> Advance(const std::set<OracleStack>& states, std::string_view input) const;
  std::set<OracleStack> PartialStates(std::string_view input) const {
    return Advance(InitialStates(), input);
  }
  /*! \brief True when some state has no frames and sits on a root-final node. */
  bool CanTerminate(const std::set<OracleStack>& states) const;
  bool Accepts(std::string_view input) const { return CanTerminate(PartialStates(input)); }

  /*! \brief Closure of an arbitrary set of raw states. */
  std::set<OracleStack> Closure(std::set<OracleStack> states) const;

  /*!
   * \brief Length of the longest prefix of `input` that leaves a non-empty state set.
   * Equals input.size() when the whole input is a viable prefix.
   */
  size_t ViablePrefixLength(std::string_view input) const;

 private:
  const Pda& pda_;
  size_t state_cap_;
};

}  // namespace gmask

#endif  // GMASK_PDA_H_
