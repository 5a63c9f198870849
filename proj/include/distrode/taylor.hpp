#pragma once

// Truncated Taylor-series arithmetic. A series holds coefficients
// c_k = f^(k)(x0)/k! up to a fixed order; all binary ops truncate to the
// shorter length of the operands.

#include <vector>

#include "distrode/common.hpp"

namespace distrode::taylor {

using Series = std::vector<Scalar>;

inline Series constant(Scalar c, int len) {
  Series s(len, Scalar(0));
  if (len > 0) s[0] = c;
  return s;
}

// Series of the identity function x at expansion point x0.
inline Series variable(double x0, int len) {
  Series s(len, Scalar(0));
  if (len > 0) s[0] = x0;
  if (len > 1) s[1] = Scalar(1);
  return s;
}

inline Series add(const Series& a, const Series& b) {
  Series r(std::min(a.size(), b.size()));
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = a[k] + b[k];
  return r;
}

inline Series sub(const Series& a, const Series& b) {
  Series r(std::min(a.size(), b.size()));
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = a[k] - b[k];
  return r;
}

inline Series neg(const Series& a) {
  Series r(a);
  for (auto& c : r) c = -c;
  return r;
}

inline Series scale(Scalar s, const Series& a) {
  Series r(a);
  for (auto& c : r) c *= s;
  return r;
}

inline Series mul(const Series& a, const Series& b) {
  std::size_t len = std::min(a.size(), b.size());
  Series r(len, Scalar(0));
  for (std::size_t i = 0; i < len; ++i)
    for (std::size_t j = 0; i + j < len; ++j) r[i + j] += a[i] * b[j];
  return r;
}

// Throws EvalError when the denominator vanishes at the expansion point.
inline Series div(const Series& a, const Series& b) {
  std::size_t len = std::min(a.size(), b.size());
  Series r(len, Scalar(0));
  if (len == 0) return r;
  if (b[0] == Scalar(0)) throw EvalError("division by zero");
  for (std::size_t k = 0; k < len; ++k) {
    Scalar acc = a[k];
    for (std::size_t j = 0; j < k; ++j) acc -= r[j] * b[k - j];
    r[k] = acc / b[0];
  }
  return r;
}

inline Series ipow(const Series& a, int e) {
  std::size_t len = a.size();
  if (e < 0) return div(constant(Scalar(1), static_cast<int>(len)), ipow(a, -e));
  Series r = constant(Scalar(1), static_cast<int>(len));
  Series base = a;
  while (e > 0) {
    if (e & 1) r = mul(r, base);
    e >>= 1;
    if (e) base = mul(base, base);
  }
  return r;
}

inline Series exp(const Series& u) {
  std::size_t len = u.size();
  Series r(len, Scalar(0));
  if (len == 0) return r;
  r[0] = std::exp(u[0]);
  for (std::size_t k = 1; k < len; ++k) {
    Scalar acc(0);
    for (std::size_t j = 1; j <= k; ++j) acc += double(j) * u[j] * r[k - j];
    r[k] = acc / double(k);
  }
  return r;
}

inline void sin_cos(const Series& u, Series& s, Series& c) {
  std::size_t len = u.size();
  s.assign(len, Scalar(0));
  c.assign(len, Scalar(0));
  if (len == 0) return;
  s[0] = std::sin(u[0]);
  c[0] = std::cos(u[0]);
  for (std::size_t k = 1; k < len; ++k) {
    Scalar as(0), ac(0);
    for (std::size_t j = 1; j <= k; ++j) {
      as += double(j) * u[j] * c[k - j];
      ac -= double(j) * u[j] * s[k - j];
    }
    s[k] = as / double(k);
    c[k] = ac / double(k);
  }
}

// Converts Taylor coefficients to derivative values f, f', ..., truncating
// factorial growth exactly for the orders used here (<= 20 or so).
inline std::vector<Scalar> to_derivatives(const Series& t) {
  std::vector<Scalar> d(t.size());
  double fact = 1.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k > 0) fact *= double(k);
    d[k] = t[k] * fact;
  }
  return d;
}

inline Series from_derivatives(const std::vector<Scalar>& d) {
  Series t(d.size());
  double fact = 1.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (k > 0) fact *= double(k);
    t[k] = d[k] / fact;
  }
  return t;
}

inline Scalar horner(const Series& t, double dx) {
  Scalar acc(0);
  for (std::size_t k = t.size(); k-- > 0;) acc = acc * dx + t[k];
  return acc;
}

}  // namespace distrode::taylor
