#pragma once

#include <cctype>
#include <cstdlib>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "subhj/carnot.hpp"

namespace subhj {

/// Arithmetic expression over point coordinates x1..xn.
struct ScalarExpr {
  enum class Kind { Num, Var, Neg, Add, Sub, Mul, Div };
  Kind kind = Kind::Num;
  double value = 0.0;  ///< Num
  int axis = 0;        ///< Var, zero-based
  std::shared_ptr<const ScalarExpr> a, b;

  double eval(const Point& p) const {
    switch (kind) {
      case Kind::Num: return value;
      case Kind::Var: return p[axis];
      case Kind::Neg: return -a->eval(p);
      case Kind::Add: return a->eval(p) + b->eval(p);
      case Kind::Sub: return a->eval(p) - b->eval(p);
      case Kind::Mul: return a->eval(p) * b->eval(p);
      case Kind::Div: return a->eval(p) / b->eval(p);
    }
    return 0.0;
  }
};

using ScalarExprPtr = std::shared_ptr<const ScalarExpr>;

/// Boolean predicate over point coordinates: comparisons combined with
/// &&, ||, ! and parentheses.
struct Predicate {
  enum class Kind { True, Cmp, And, Or, Not };
  enum class Cmp { Lt, Le, Gt, Ge, Eq, Ne };
  Kind kind = Kind::True;
  Cmp cmp = Cmp::Lt;
  ScalarExprPtr lhs, rhs;
  std::shared_ptr<const Predicate> a, b;

  bool eval(const Point& p) const {
    switch (kind) {
      case Kind::True: return true;
      case Kind::Cmp: {
        const double l = lhs->eval(p), r = rhs->eval(p);
        switch (cmp) {
          case Cmp::Lt: return l < r;
          case Cmp::Le: return l <= r;
          case Cmp::Gt: return l > r;
          case Cmp::Ge: return l >= r;
          case Cmp::Eq: return l == r;
          case Cmp::Ne: return l != r;
        }
        return false;
      }
      case Kind::And: return a->eval(p) && b->eval(p);
      case Kind::Or: return a->eval(p) || b->eval(p);
      case Kind::Not: return !a->eval(p);
    }
    return false;
  }
};

using PredicatePtr = std::shared_ptr<const Predicate>;

namespace detail {

struct Token {
  enum class Type { Num, Ident, Op, End } type = Type::End;
  std::string text;
  double num = 0.0;
  std::size_t pos = 0;
};

inline std::vector<Token> lex_expr(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char ch = src[i];
    if (std::isspace(static_cast<unsigned char>(ch))) { ++i; continue; }
    Token t;
    t.pos = i;
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      char* end = nullptr;
      t.type = Token::Type::Num;
      t.num = std::strtod(src.c_str() + i, &end);
      const auto len = static_cast<std::size_t>(end - (src.c_str() + i));
      if (len == 0) throw std::invalid_argument("expression: bad number at position " + std::to_string(i));
      t.text = src.substr(i, len);
      i += len;
    } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      t.type = Token::Type::Ident;
      t.text = src.substr(i, j - i);
      i = j;
    } else {
      static const char* two[] = {"&&", "||", "<=", ">=", "==", "!="};
      t.type = Token::Type::Op;
      t.text = src.substr(i, 1);
      for (const char* op : two)
        if (src.compare(i, 2, op) == 0) { t.text = op; break; }
      i += t.text.size();
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.pos = src.size();
  out.push_back(end);
  return out;
}

/// Recursive-descent parser for predicates and scalar expressions.
class ExprParser {
 public:
  ExprParser(const std::string& src, int dims)
      : src_(src), dims_(dims), toks_(lex_expr(src)) {}

  ScalarExprPtr parse_scalar() {
    auto e = additive();
    expect_end();
    return e;
  }

  PredicatePtr parse_predicate() {
    auto p = or_expr();
    expect_end();
    return p;
  }

 private:
  const std::string& src_;
  int dims_;
  std::vector<Token> toks_;
  std::size_t at_ = 0;

  const Token& cur() const { return toks_[at_]; }
  bool is_op(const char* s) const {
    return cur().type == Token::Type::Op && cur().text == s;
  }
  void advance() { if (at_ + 1 < toks_.size()) ++at_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("expression \"" + src_ + "\": " + msg +
                                " at position " + std::to_string(cur().pos));
  }

  void expect_end() {
    if (cur().type != Token::Type::End) fail("trailing input");
  }

  PredicatePtr or_expr() {
    auto l = and_expr();
    while (is_op("||")) {
      advance();
      auto node = std::make_shared<Predicate>();
      node->kind = Predicate::Kind::Or;
      node->a = l;
      node->b = and_expr();
      l = node;
    }
    return l;
  }

  PredicatePtr and_expr() {
    auto l = unary_pred();
    while (is_op("&&")) {
      advance();
      auto node = std::make_shared<Predicate>();
      node->kind = Predicate::Kind::And;
      node->a = l;
      node->b = unary_pred();
      l = node;
    }
    return l;
  }

  PredicatePtr unary_pred() {
    if (is_op("!")) {
      advance();
      auto node = std::make_shared<Predicate>();
      node->kind = Predicate::Kind::Not;
      node->a = unary_pred();
      return node;
    }
    // A "(" may open either a boolean group or an arithmetic subterm of a
    // comparison; try the boolean reading first and rewind if it fails.
    if (is_op("(")) {
      const std::size_t save = at_;
      advance();
      try {
        auto inner = or_expr();
        if (!is_op(")")) fail("expected )");
        advance();
        return inner;
      } catch (const std::invalid_argument&) {
        at_ = save;
      }
    }
    return comparison();
  }

  PredicatePtr comparison() {
    auto l = additive();
    Predicate::Cmp op;
    if (is_op("<")) op = Predicate::Cmp::Lt;
    else if (is_op("<=")) op = Predicate::Cmp::Le;
    else if (is_op(">")) op = Predicate::Cmp::Gt;
    else if (is_op(">=")) op = Predicate::Cmp::Ge;
    else if (is_op("==")) op = Predicate::Cmp::Eq;
    else if (is_op("!=")) op = Predicate::Cmp::Ne;
    else fail("expected comparison operator");
    advance();
    auto node = std::make_shared<Predicate>();
    node->kind = Predicate::Kind::Cmp;
    node->cmp = op;
    node->lhs = l;
    node->rhs = additive();
    return node;
  }

  ScalarExprPtr additive() {
    auto l = term();
    while (is_op("+") || is_op("-")) {
      const bool add = is_op("+");
      advance();
      auto node = std::make_shared<ScalarExpr>();
      node->kind = add ? ScalarExpr::Kind::Add : ScalarExpr::Kind::Sub;
      node->a = l;
      node->b = term();
      l = node;
    }
    return l;
  }

  ScalarExprPtr term() {
    auto l = factor();
    while (is_op("*") || is_op("/")) {
      const bool mul = is_op("*");
      advance();
      auto node = std::make_shared<ScalarExpr>();
      node->kind = mul ? ScalarExpr::Kind::Mul : ScalarExpr::Kind::Div;
      node->a = l;
      node->b = factor();
      l = node;
    }
    return l;
  }

  ScalarExprPtr factor() {
    if (is_op("-")) {
      advance();
      auto node = std::make_shared<ScalarExpr>();
      node->kind = ScalarExpr::Kind::Neg;
      node->a = factor();
      return node;
    }
    if (is_op("(")) {
      advance();
      auto inner = additive();
      if (!is_op(")")) fail("expected )");
      advance();
      return inner;
    }
    if (cur().type == Token::Type::Num) {
      auto node = std::make_shared<ScalarExpr>();
      node->kind = ScalarExpr::Kind::Num;
      node->value = cur().num;
      advance();
      return node;
    }
    if (cur().type == Token::Type::Ident) {
      const std::string& name = cur().text;
      if (name.size() >= 2 && name[0] == 'x') {
        char* end = nullptr;
        const long idx = std::strtol(name.c_str() + 1, &end, 10);
        if (*end == '\0' && idx >= 1 && idx <= dims_) {
          auto node = std::make_shared<ScalarExpr>();
          node->kind = ScalarExpr::Kind::Var;
          node->axis = static_cast<int>(idx - 1);
          advance();
          return node;
        }
      }
      fail("unknown identifier \"" + name + "\" (coordinates are x1..x" +
           std::to_string(dims_) + ")");
    }
    fail("expected a number, coordinate, or parenthesized term");
  }
};

} // namespace detail

/// Parses an arithmetic expression in coordinates x1..xn.
inline ScalarExprPtr parse_scalar_expr(const std::string& src, int dims) {
  return detail::ExprParser(src, dims).parse_scalar();
}

/// Parses a boolean predicate (comparisons, &&, ||, !, parentheses).
inline PredicatePtr parse_predicate(const std::string& src, int dims) {
  return detail::ExprParser(src, dims).parse_predicate();
}

inline PredicatePtr predicate_true() {
  auto p = std::make_shared<Predicate>();
  p->kind = Predicate::Kind::True;
  return p;
}

} // namespace subhj
