/*!
 *  Copyright (c) 2026 by Contributors
 * \file pda.cc
 * \brief Pda storage, statistics, DOT output and serialization.
 */
#include "gmask/pda.h"

#include <algorithm>
#include <cstdio>
#include <tuple>

#include "byte_io.h"

namespace gmask {

Pda::Pda(std::vector<PdaNode> nodes, std::vector<PdaEdge> edges, std::vector<PdaRule> rules,
         int32_t root_rule)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), rules_(std::move(rules)),
      root_rule_(root_rule) {
  int32_t n = num_nodes();
  for (auto& e : edges_) {
    GMASK_CHECK(e.src >= 0 && e.src < n && e.dst >= 0 && e.dst < n) << "edge endpoint out of range";
    if (e.kind == EdgeKind::kChar) {
      e.ranges = NormalizeRanges(std::move(e.ranges));
      e.bytes = ByteSet::FromRanges(e.ranges);
    } else {
      e.ranges.clear();
      e.bytes = ByteSet();
    }
    if (e.kind != EdgeKind::kRuleRef) e.rule_ref = -1;
  }
  std::sort(edges_.begin(), edges_.end(), [](const PdaEdge& a, const PdaEdge& b) {
    return std::tie(a.src, a.kind, a.rule_ref, a.dst, a.ranges) <
           std::tie(b.src, b.kind, b.rule_ref, b.dst, b.ranges);
  });
  offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) ++offsets_[e.src + 1];
  for (int32_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  for (auto& r : rules_) r.finals.clear();
  for (int32_t i = 0; i < n; ++i) {
    GMASK_CHECK(nodes_[i].rule >= 0 && nodes_[i].rule < num_rules()) << "node rule out of range";
    if (nodes_[i].final) rules_[nodes_[i].rule].finals.push_back(i);
  }
}

bool Pda::IsScannable(int32_t node) const {
  for (const auto& e : OutEdges(node)) {
    if (e.kind == EdgeKind::kChar) return true;
  }
  return false;
}

PdaStats Pda::Stats() const {
  PdaStats s;
  s.num_nodes = num_nodes();
  for (const auto& e : edges_) {
    switch (e.kind) {
      case EdgeKind::kChar:
        ++s.num_char_edges;
        break;
      case EdgeKind::kRuleRef:
        ++s.num_ref_edges;
        break;
      case EdgeKind::kEpsilon:
        ++s.num_epsilon_edges;
        break;
    }
  }
  return s;
}

namespace {

std::string DotByte(int b) {
  if (b > 0x20 && b < 0x7F && b != '"' && b != '\\' && b != '[' && b != ']' && b != '-') {
    return std::string(1, static_cast<char>(b));
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "\\\\x%02X", b);
  return buf;
}

}  // namespace

std::string Pda::ToDot() const {
  std::string out = "digraph pda {\n  rankdir=LR;\n";
  for (int32_t r = 0; r < num_rules(); ++r) {
    out += "  subgraph cluster_" + std::to_string(r) + " {\n    label=\"" + rules_[r].name +
           (r == root_rule_ ? " (root)" : "") + "\";\n";
    for (int32_t i = 0; i < num_nodes(); ++i) {
      if (nodes_[i].rule != r) continue;
      out += "    n" + std::to_string(i) + " [label=\"" + std::to_string(i) + "\"";
      if (nodes_[i].final) out += ", shape=doublecircle";
      if (rules_[r].start == i) out += ", style=bold";
      out += "];\n";
    }
    out += "  }\n";
  }
  for (const auto& e : edges_) {
    std::string label;
    if (e.kind == EdgeKind::kChar) {
      label = "[";
      for (const auto& r : e.ranges) {
        label += DotByte(r.lo);
        if (r.hi != r.lo) label += "-" + DotByte(r.hi);
      }
      label += "]";
    } else if (e.kind == EdgeKind::kRuleRef) {
      label = rules_[e.rule_ref].name;
    } else {
      label = "eps";
    }
    out += "  n" + std::to_string(e.src) + " -> n" + std::to_string(e.dst) + " [label=\"" +
           label + "\"" + (e.kind == EdgeKind::kRuleRef ? ", style=dashed" : "") + "];\n";
  }
  out += "}\n";
  return out;
}

void Pda::Serialize(std::string* out) const {
  ByteWriter w(out);
  w.I32(root_rule_);
  w.U32(static_cast<uint32_t>(rules_.size()));
  for (const auto& r : rules_) {
    w.Bytes(r.name);
    w.I32(r.start);
  }
  w.U32(static_cast<uint32_t>(nodes_.size()));
  for (const auto& n : nodes_) {
    w.I32(n.rule);
    w.U8(n.final ? 1 : 0);
  }
  w.U32(static_cast<uint32_t>(edges_.size()));
  for (const auto& e : edges_) {
    w.I32(e.src);
    w.I32(e.dst);
    w.U8(static_cast<uint8_t>(e.kind));
    w.I32(e.rule_ref);
    w.U32(static_cast<uint32_t>(e.ranges.size()));
    for (const auto& r : e.ranges) {
      w.U8(r.lo);
      w.U8(r.hi);
    }
  }
}

Pda Pda::Deserialize(std::string_view data, size_t* pos) {
  ByteReader r(data, pos);
  int32_t root = r.I32();
  std::vector<PdaRule> rules(r.Count(8));
  for (auto& rule : rules) {
    rule.name = r.Bytes();
    rule.start = r.I32();
  }
  std::vector<PdaNode> nodes(r.Count(5));
  for (auto& n : nodes) {
    n.rule = r.I32();
    n.final = r.U8() != 0;
  }
  std::vector<PdaEdge> edges(r.Count(17));
  for (auto& e : edges) {
    e.src = r.I32();
    e.dst = r.I32();
    uint8_t kind = r.U8();
    if (kind > 2) throw Error("corrupt bundle: bad edge kind");
    e.kind = static_cast<EdgeKind>(kind);
    e.rule_ref = r.I32();
    e.ranges.resize(r.Count(2));
    for (auto& range : e.ranges) {
      range.lo = r.U8();
      range.hi = r.U8();
    }
  }
  int32_t n = static_cast<int32_t>(nodes.size());
  if (root < 0 || root >= static_cast<int32_t>(rules.size())) {
    throw Error("corrupt bundle: bad root rule");
  }
  for (const auto& rule : rules) {
    if (rule.start < 0 || rule.start >= n) throw Error("corrupt bundle: bad rule start");
  }
  for (const auto& node : nodes) {
    if (node.rule < 0 || node.rule >= static_cast<int32_t>(rules.size())) {
      throw Error("corrupt bundle: bad node rule");
    }
  }
  for (const auto& e : edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
      throw Error("corrupt bundle: bad edge endpoint");
    }
    if (e.kind == EdgeKind::kRuleRef &&
        (e.rule_ref < 0 || e.rule_ref >= static_cast<int32_t>(rules.size()))) {
      throw Error("corrupt bundle: bad rule reference");
    }
  }
  return Pda(std::move(nodes), std::move(edges), std::move(rules), root);
}

}  // namespace gmask
