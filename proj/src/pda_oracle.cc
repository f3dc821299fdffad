/*!
 *  Copyright (c) 2026 by Contributors
 * \file pda_oracle.cc
 * \brief Reference interpreter over explicit stacks.
 */
#include <deque>

#include "gmask/error.h"
#include "gmask/pda.h"

namespace gmask {

PdaOracle::PdaOracle(const Pda& pda, size_t state_cap) : pda_(pda), state_cap_(state_cap) {}

std::set<OracleStack> PdaOracle::Closure(std::set<OracleStack> states) const {
  std::deque<OracleStack> work(states.begin(), states.end());
  auto add = [&](OracleStack s) {
    if (states.insert(s).second) {
      if (states.size() > state_cap_) {
        throw StateCapError("oracle state set exceeded cap of " + std::to_string(state_cap_));
      }
      work.push_back(std::move(s));
    }
  };
  while (!work.empty()) {
    OracleStack s = std::move(work.front());
    work.pop_front();
    for (const auto& e : pda_.OutEdges(s.node)) {
      if (e.kind == EdgeKind::kEpsilon) {
        add(OracleStack{e.dst, s.frames});
      } else if (e.kind == EdgeKind::kRuleRef) {
        OracleStack pushed{pda_.rule(e.rule_ref).start, s.frames};
        pushed.frames.push_back(e.dst);
        add(std::move(pushed));
      }
    }
    if (pda_.node(s.node).final && !s.frames.empty()) {
      OracleStack popped{s.frames.back(), s.frames};
      popped.frames.pop_back();
      add(std::move(popped));
    }
  }
  return states;
}

std::set<OracleStack> PdaOracle::InitialStates() const {
  return Closure({OracleStack{pda_.root_start(), {}}});
}

std::set<OracleStack> PdaOracle::Advance(const std::set<OracleStack>& states,
                                         std::string_view input) const {
  std::set<OracleStack> cur = states;
  for (char c : input) {
    uint8_t b = static_cast<uint8_t>(c);
    std::set<OracleStack> next;
    for (const auto& s : cur) {
      for (const auto& e : pda_.OutEdges(s.node)) {
        if (e.kind != EdgeKind::kChar) continue;
        for (const auto& r : e.ranges) {
          if (b >= r.lo && b <= r.hi) {
            next.insert(OracleStack{e.dst, s.frames});
            break;
          }
        }
      }
    }
    if (next.empty()) return next;
    cur = Closure(std::move(next));
  }
  return cur;
}

bool PdaOracle::CanTerminate(const std::set<OracleStack>& states) const {
  for (const auto& s : states) {
    if (s.frames.empty() && pda_.node(s.node).final && pda_.node(s.node).rule == pda_.root_rule()) {
      return true;
    }
  }
  return false;
}

size_t PdaOracle::ViablePrefixLength(std::string_view input) const {
  std::set<OracleStack> cur = InitialStates();
  for (size_t i = 0; i < input.size(); ++i) {
    cur = Advance(cur, input.substr(i, 1));
    if (cur.empty()) return i;
  }
  return input.size();
}

}  // namespace gmask
