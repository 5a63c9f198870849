#pragma once

// Globally smooth scalar functions of one variable, built from the grammar
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' int)?
//   base   := number | 'x' | '(' expr ')'
//           | ('sin'|'cos'|'exp'|'-') '(' expr ')' | '-' base
//
// Numbers are decimals with an optional exponent and an optional trailing
// 'i' for imaginary literals. Expression trees are immutable and closed
// under arithmetic and exact differentiation.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "distrode/common.hpp"

namespace distrode {

class SmoothExpr {
 public:
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };

  struct Node {
    Kind kind;
    Scalar value{};  // Const
    int exponent{};  // Pow
    std::shared_ptr<const Node> a, b;
  };
  using NodePtr = std::shared_ptr<const Node>;

  SmoothExpr() : node_(zero_node()) {}
  explicit SmoothExpr(NodePtr n) : node_(std::move(n)) {}

  static SmoothExpr constant(Scalar c);
  static SmoothExpr constant(double c) { return constant(Scalar(c)); }
  static SmoothExpr var();

  friend SmoothExpr operator+(const SmoothExpr&, const SmoothExpr&);
  friend SmoothExpr operator-(const SmoothExpr&, const SmoothExpr&);
  friend SmoothExpr operator*(const SmoothExpr&, const SmoothExpr&);
  friend SmoothExpr operator/(const SmoothExpr&, const SmoothExpr&);
  friend SmoothExpr operator-(const SmoothExpr&);
  SmoothExpr pow(int e) const;

  static SmoothExpr sin(const SmoothExpr&);
  static SmoothExpr cos(const SmoothExpr&);
  static SmoothExpr exp(const SmoothExpr&);

  // Exact first derivative.
  SmoothExpr derivative() const;

  bool is_constant(Scalar* out = nullptr) const;

  const NodePtr& node() const { return node_; }
  std::string str() const;

 private:
  static const NodePtr& zero_node();
  NodePtr node_;
};

enum class CombineOp { Add, Mul, Scale };

// Throws ParseError with a byte offset on malformed input.
SmoothExpr parse_expr(std::string_view source);

// k-th exact derivative; k = 0 returns e unchanged.
SmoothExpr differentiate(const SmoothExpr& e, int k = 1);

// Throws EvalError where a divisor evaluates to zero.
Scalar evaluate(const SmoothExpr& e, double x);

// Values of e, e', ..., e^(maxk) at x, computed in Taylor mode.
std::vector<Scalar> eval_jet(const SmoothExpr& e, double x, int maxk);

// Tree composition: Add/Mul fold the argument list; Scale expects a leading
// constant followed by one expression.
SmoothExpr combine(CombineOp op, const std::vector<SmoothExpr>& args);
SmoothExpr scale(Scalar c, const SmoothExpr& e);

// Round-trips through parse_expr.
std::string to_string(const SmoothExpr& e);

// True when e evaluates finitely at `samples` points of [lo, hi]
// (dense sampling; 129 points by default).
bool pole_free_on(const SmoothExpr& e, double lo, double hi, int samples = 129);

}  // namespace distrode
