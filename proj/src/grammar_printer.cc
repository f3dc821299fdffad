/*!
 *  Copyright (c) 2026 by Contributors
 * \file grammar_printer.cc
 * \brief Emits grammar text that parses back into the same structure.
 */
#include <cstdio>

#include "gmask/grammar.h"

namespace gmask {

namespace {

std::string HexByte(uint8_t b) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "\\x%02X", b);
  return buf;
}

std::string LiteralChar(uint8_t b) {
  switch (b) {
    case '"':
      return "\\\"";
    case '\\':
      return "\\\\";
    case '\n':
      return "\\n";
    case '\t':
      return "\\t";
    case '\r':
      return "\\r";
    default:
      if (b >= 0x20 && b < 0x7F) return std::string(1, static_cast<char>(b));
      return HexByte(b);
  }
}

std::string ClassChar(uint8_t b) {
  switch (b) {
    case ']':
    case '[':
    case '\\':
    case '^':
    case '-':
      return std::string("\\") + static_cast<char>(b);
    default:
      return LiteralChar(b);
  }
}

class Printer {
 public:
  explicit Printer(const Grammar& g) : g_(g) {}

  // `context`: 0 = top level, 1 = inside a sequence, 2 = operand of a postfix operator.
  std::string Print(const RuleExpr& e, int context) const {
    return std::visit(
        [&](const auto& n) -> std::string {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, ByteClassExpr>) {
            std::string s = n.negated ? "[^" : "[";
            for (const auto& r : n.ranges) {
              s += ClassChar(r.lo);
              if (r.hi != r.lo) s += "-" + ClassChar(r.hi);
            }
            return s + "]";
          } else if constexpr (std::is_same_v<T, LiteralExpr>) {
            std::string s = "\"";
            for (char c : n.bytes) s += LiteralChar(static_cast<uint8_t>(c));
            return s + "\"";
          } else if constexpr (std::is_same_v<T, EmptyExpr>) {
            return "\"\"";
          } else if constexpr (std::is_same_v<T, RuleRefExpr>) {
            return g_.rule(n.rule_id).name;
          } else if constexpr (std::is_same_v<T, SequenceExpr>) {
            std::string s;
            for (size_t i = 0; i < n.items.size(); ++i) {
              if (i) s += " ";
              s += Print(n.items[i], 1);
            }
            return context >= 1 ? "(" + s + ")" : s;
          } else if constexpr (std::is_same_v<T, ChoiceExpr>) {
            std::string s;
            for (size_t i = 0; i < n.items.size(); ++i) {
              if (i) s += " | ";
              s += Print(n.items[i], 0);
            }
            return context >= 1 ? "(" + s + ")" : s;
          } else {
            std::string s = Print(*n.body, 2);
            if (n.min == 0 && !n.max) return s + "*";
            if (n.min == 1 && !n.max) return s + "+";
            if (n.min == 0 && n.max && *n.max == 1) return s + "?";
            if (!n.max) return s + "{" + std::to_string(n.min) + ",}";
            if (*n.max == n.min) return s + "{" + std::to_string(n.min) + "}";
            return s + "{" + std::to_string(n.min) + "," + std::to_string(*n.max) + "}";
          }
        },
        e.node);
  }

 private:
  const Grammar& g_;
};

}  // namespace

std::string PrintExpr(const Grammar& grammar, const RuleExpr& expr) {
  return Printer(grammar).Print(expr, 0);
}

std::string PrintGrammar(const Grammar& grammar) {
  Printer printer(grammar);
  std::string out;
  for (int32_t i = 0; i < grammar.num_rules(); ++i) {
    const auto& rule = grammar.rule(i);
    out += rule.name + " ::= " + printer.Print(rule.body, 0) + "\n";
  }
  return out;
}

}  // namespace gmask
