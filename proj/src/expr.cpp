#include "distrode/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "distrode/taylor.hpp"

namespace distrode {

using Kind = SmoothExpr::Kind;
using NodePtr = SmoothExpr::NodePtr;

namespace {

NodePtr make_node(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<SmoothExpr::Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_const(Scalar c) {
  auto n = std::make_shared<SmoothExpr::Node>();
  n->kind = Kind::Const;
  n->value = c;
  return n;
}

bool const_val(const NodePtr& n, Scalar* out) {
  if (n->kind != Kind::Const) return false;
  if (out) *out = n->value;
  return true;
}

bool is_const(const NodePtr& n, Scalar v) {
  Scalar c;
  return const_val(n, &c) && c == v;
}

// Smart constructors fold constants and drop identity operands. This is
// structural cleanup only, not symbolic simplification.
NodePtr n_add(NodePtr a, NodePtr b) {
  Scalar ca, cb;
  if (const_val(a, &ca) && const_val(b, &cb)) return make_const(ca + cb);
  if (is_const(a, Scalar(0))) return b;
  if (is_const(b, Scalar(0))) return a;
  return make_node(Kind::Add, std::move(a), std::move(b));
}

NodePtr n_sub(NodePtr a, NodePtr b) {
  Scalar ca, cb;
  if (const_val(a, &ca) && const_val(b, &cb)) return make_const(ca - cb);
  if (is_const(b, Scalar(0))) return a;
  return make_node(Kind::Sub, std::move(a), std::move(b));
}

NodePtr n_mul(NodePtr a, NodePtr b) {
  Scalar ca, cb;
  if (const_val(a, &ca) && const_val(b, &cb)) return make_const(ca * cb);
  if (is_const(a, Scalar(0)) || is_const(b, Scalar(0))) return make_const(0);
  if (is_const(a, Scalar(1))) return b;
  if (is_const(b, Scalar(1))) return a;
  return make_node(Kind::Mul, std::move(a), std::move(b));
}

NodePtr n_div(NodePtr a, NodePtr b) {
  if (is_const(a, Scalar(0)) && !is_const(b, Scalar(0))) return make_const(0);
  if (is_const(b, Scalar(1))) return a;
  return make_node(Kind::Div, std::move(a), std::move(b));
}

NodePtr n_neg(NodePtr a) {
  Scalar c;
  if (const_val(a, &c)) return make_const(-c);
  if (a->kind == Kind::Neg) return a->a;
  return make_node(Kind::Neg, std::move(a));
}

NodePtr n_pow(NodePtr a, int e) {
  if (e == 0) return make_const(1);
  if (e == 1) return a;
  Scalar c;
  if (const_val(a, &c) && e > 0) return make_const(std::pow(c, e));
  auto n = make_node(Kind::Pow, std::move(a));
  auto m = std::const_pointer_cast<SmoothExpr::Node>(n);
  m->exponent = e;
  return n;
}

NodePtr n_fun(Kind k, NodePtr a) { return make_node(k, std::move(a)); }

NodePtr deriv(const NodePtr& n) {
  switch (n->kind) {
    case Kind::Const: return make_const(0);
    case Kind::Var: return make_const(1);
    case Kind::Add: return n_add(deriv(n->a), deriv(n->b));
    case Kind::Sub: return n_sub(deriv(n->a), deriv(n->b));
    case Kind::Mul:
      return n_add(n_mul(deriv(n->a), n->b), n_mul(n->a, deriv(n->b)));
    case Kind::Div:
      // (u/v)' = (u'v - uv')/v^2
      return n_div(n_sub(n_mul(deriv(n->a), n->b), n_mul(n->a, deriv(n->b))),
                   n_pow(n->b, 2));
    case Kind::Pow:
      return n_mul(n_mul(make_const(Scalar(double(n->exponent))),
                         n_pow(n->a, n->exponent - 1)),
                   deriv(n->a));
    case Kind::Neg: return n_neg(deriv(n->a));
    case Kind::Sin: return n_mul(n_fun(Kind::Cos, n->a), deriv(n->a));
    case Kind::Cos: return n_neg(n_mul(n_fun(Kind::Sin, n->a), deriv(n->a)));
    case Kind::Exp: return n_mul(n_fun(Kind::Exp, n->a), deriv(n->a));
  }
  throw std::logic_error("bad expr node");
}

Scalar eval_node(const SmoothExpr::Node& n, double x) {
  switch (n.kind) {
    case Kind::Const: return n.value;
    case Kind::Var: return Scalar(x);
    case Kind::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
    case Kind::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
    case Kind::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
    case Kind::Div: {
      Scalar den = eval_node(*n.b, x);
      if (den == Scalar(0)) throw EvalError("division by zero at x=" + std::to_string(x));
      return eval_node(*n.a, x) / den;
    }
    case Kind::Pow: {
      Scalar base = eval_node(*n.a, x);
      int e = n.exponent;
      if (e < 0) {
        if (base == Scalar(0))
          throw EvalError("division by zero at x=" + std::to_string(x));
        base = Scalar(1) / base;
        e = -e;
      }
      Scalar r(1);
      while (e > 0) {
        if (e & 1) r *= base;
        e >>= 1;
        if (e) base *= base;
      }
      return r;
    }
    case Kind::Neg: return -eval_node(*n.a, x);
    case Kind::Sin: return std::sin(eval_node(*n.a, x));
    case Kind::Cos: return std::cos(eval_node(*n.a, x));
    case Kind::Exp: return std::exp(eval_node(*n.a, x));
  }
  throw std::logic_error("bad expr node");
}

taylor::Series jet_node(const SmoothExpr::Node& n, double x, int len) {
  using namespace taylor;
  switch (n.kind) {
    case Kind::Const: return constant(n.value, len);
    case Kind::Var: return variable(x, len);
    case Kind::Add: return add(jet_node(*n.a, x, len), jet_node(*n.b, x, len));
    case Kind::Sub: return sub(jet_node(*n.a, x, len), jet_node(*n.b, x, len));
    case Kind::Mul: return mul(jet_node(*n.a, x, len), jet_node(*n.b, x, len));
    case Kind::Div: return div(jet_node(*n.a, x, len), jet_node(*n.b, x, len));
    case Kind::Pow: return ipow(jet_node(*n.a, x, len), n.exponent);
    case Kind::Neg: return neg(jet_node(*n.a, x, len));
    case Kind::Sin: {
      Series s, c;
      sin_cos(jet_node(*n.a, x, len), s, c);
      return s;
    }
    case Kind::Cos: {
      Series s, c;
      sin_cos(jet_node(*n.a, x, len), s, c);
      return c;
    }
    case Kind::Exp: return exp(jet_node(*n.a, x, len));
  }
  throw std::logic_error("bad expr node");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_scalar(Scalar c) {
  if (c.imag() == 0.0) return fmt_double(c.real());
  if (c.real() == 0.0) return fmt_double(c.imag()) + "i";
  std::string im = fmt_double(c.imag());
  std::string sep = (!im.empty() && im[0] == '-') ? "" : "+";
  return "(" + fmt_double(c.real()) + sep + im + "i)";
}

void print_node(const SmoothExpr::Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Const: out += fmt_scalar(n.value); return;
    case Kind::Var: out += "x"; return;
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: {
      const char* op = n.kind == Kind::Add   ? " + "
                       : n.kind == Kind::Sub ? " - "
                       : n.kind == Kind::Mul ? " * "
                                             : " / ";
      out += "(";
      print_node(*n.a, out);
      out += op;
      print_node(*n.b, out);
      out += ")";
      return;
    }
    case Kind::Pow: {
      bool atom = n.a->kind == Kind::Var ||
                  (n.a->kind == Kind::Const && n.a->value.imag() == 0.0 &&
                   n.a->value.real() >= 0.0);
      if (atom) {
        print_node(*n.a, out);
      } else {
        out += "(";
        print_node(*n.a, out);
        out += ")";
      }
      out += "^" + std::to_string(n.exponent);
      return;
    }
    case Kind::Neg:
      out += "-(";
      print_node(*n.a, out);
      out += ")";
      return;
    case Kind::Sin:
    case Kind::Cos:
    case Kind::Exp: {
      out += n.kind == Kind::Sin ? "sin(" : n.kind == Kind::Cos ? "cos(" : "exp(";
      print_node(*n.a, out);
      out += ")";
      return;
    }
  }
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  SmoothExpr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError("syntax error", pos_);
    return SmoothExpr(e);
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool accept(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    skip_ws();
    if (!accept(c))
      throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  NodePtr expr() {
    NodePtr e = term();
    for (;;) {
      if (accept('+'))
        e = n_add(e, term());
      else if (accept('-'))
        e = n_sub(e, term());
      else
        return e;
    }
  }

  NodePtr term() {
    NodePtr e = factor();
    for (;;) {
      if (accept('*'))
        e = n_mul(e, factor());
      else if (accept('/'))
        e = n_div(e, factor());
      else
        return e;
    }
  }

  NodePtr factor() {
    NodePtr e = base();
    if (accept('^')) {
      skip_ws();
      bool negexp = false;
      if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
        negexp = s_[pos_] == '-';
        ++pos_;
      }
      std::size_t start = pos_;
      long v = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        v = v * 10 + (s_[pos_] - '0');
        ++pos_;
      }
      if (pos_ == start) throw ParseError("expected integer exponent", pos_);
      e = n_pow(e, static_cast<int>(negexp ? -v : v));
    }
    return e;
  }

  NodePtr base() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (c == '-') {
      ++pos_;
      return n_neg(base());
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             std::isalpha(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
      std::string_view id = s_.substr(start, pos_ - start);
      if (id == "x") return make_node(Kind::Var);
      Kind k;
      if (id == "sin")
        k = Kind::Sin;
      else if (id == "cos")
        k = Kind::Cos;
      else if (id == "exp")
        k = Kind::Exp;
      else
        throw ParseError("unknown identifier '" + std::string(id) + "'", start);
      expect('(');
      NodePtr e = expr();
      expect(')');
      return n_fun(k, e);
    }
    throw ParseError("syntax error", pos_);
  }

  NodePtr number() {
    std::size_t start = pos_;
    bool digits = false;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
      digits = true;
    }
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
        digits = true;
      }
    }
    if (!digits) throw ParseError("malformed number", start);
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() &&
               std::isdigit(static_cast<unsigned char>(s_[pos_])))
          ++pos_;
      } else {
        pos_ = mark;  // not an exponent after all
      }
    }
    double v = std::strtod(std::string(s_.substr(start, pos_ - start)).c_str(),
                           nullptr);
    if (pos_ < s_.size() && s_[pos_] == 'i') {
      ++pos_;
      return make_const(Scalar(0.0, v));
    }
    return make_const(Scalar(v));
  }
};

}  // namespace

const NodePtr& SmoothExpr::zero_node() {
  static const NodePtr z = make_const(Scalar(0));
  return z;
}

SmoothExpr SmoothExpr::constant(Scalar c) { return SmoothExpr(make_const(c)); }
SmoothExpr SmoothExpr::var() { return SmoothExpr(make_node(Kind::Var)); }

SmoothExpr operator+(const SmoothExpr& a, const SmoothExpr& b) {
  return SmoothExpr(n_add(a.node(), b.node()));
}
SmoothExpr operator-(const SmoothExpr& a, const SmoothExpr& b) {
  return SmoothExpr(n_sub(a.node(), b.node()));
}
SmoothExpr operator*(const SmoothExpr& a, const SmoothExpr& b) {
  return SmoothExpr(n_mul(a.node(), b.node()));
}
SmoothExpr operator/(const SmoothExpr& a, const SmoothExpr& b) {
  return SmoothExpr(n_div(a.node(), b.node()));
}
SmoothExpr operator-(const SmoothExpr& a) { return SmoothExpr(n_neg(a.node())); }
SmoothExpr SmoothExpr::pow(int e) const { return SmoothExpr(n_pow(node_, e)); }
SmoothExpr SmoothExpr::sin(const SmoothExpr& a) {
  return SmoothExpr(n_fun(Kind::Sin, a.node()));
}
SmoothExpr SmoothExpr::cos(const SmoothExpr& a) {
  return SmoothExpr(n_fun(Kind::Cos, a.node()));
}
SmoothExpr SmoothExpr::exp(const SmoothExpr& a) {
  return SmoothExpr(n_fun(Kind::Exp, a.node()));
}

SmoothExpr SmoothExpr::derivative() const { return SmoothExpr(deriv(node_)); }

bool SmoothExpr::is_constant(Scalar* out) const { return const_val(node_, out); }

std::string SmoothExpr::str() const {
  std::string out;
  print_node(*node_, out);
  return out;
}

SmoothExpr parse_expr(std::string_view source) { return Parser(source).run(); }

SmoothExpr differentiate(const SmoothExpr& e, int k) {
  if (k < 0) throw std::invalid_argument("differentiate: k must be >= 0");
  SmoothExpr r = e;
  for (int i = 0; i < k; ++i) r = r.derivative();
  return r;
}

Scalar evaluate(const SmoothExpr& e, double x) { return eval_node(*e.node(), x); }

std::vector<Scalar> eval_jet(const SmoothExpr& e, double x, int maxk) {
  if (maxk < 0) throw std::invalid_argument("eval_jet: maxk must be >= 0");
  return taylor::to_derivatives(jet_node(*e.node(), x, maxk + 1));
}

SmoothExpr combine(CombineOp op, const std::vector<SmoothExpr>& args) {
  switch (op) {
    case CombineOp::Add: {
      SmoothExpr r = SmoothExpr::constant(0);
      for (const auto& a : args) r = r + a;
      return r;
    }
    case CombineOp::Mul: {
      SmoothExpr r = SmoothExpr::constant(1);
      for (const auto& a : args) r = r * a;
      return r;
    }
    case CombineOp::Scale: {
      if (args.size() != 2)
        throw std::invalid_argument("combine(Scale) expects {constant, expr}");
      Scalar c;
      if (!args[0].is_constant(&c))
        throw std::invalid_argument("combine(Scale) expects a constant first");
      return args[0] * args[1];
    }
  }
  throw std::logic_error("bad combine op");
}

SmoothExpr scale(Scalar c, const SmoothExpr& e) {
  return SmoothExpr::constant(c) * e;
}

std::string to_string(const SmoothExpr& e) { return e.str(); }

bool pole_free_on(const SmoothExpr& e, double lo, double hi, int samples) {
  if (samples < 2) samples = 2;
  for (int i = 0; i < samples; ++i) {
    double x = lo + (hi - lo) * double(i) / double(samples - 1);
    try {
      Scalar v = evaluate(e, x);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    } catch (const EvalError&) {
      return false;
    }
  }
  return true;
}

}  // namespace distrode
