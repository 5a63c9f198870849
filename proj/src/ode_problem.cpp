#include <algorithm>
#include <cmath>

#include "ode_internal.hpp"

namespace distrode {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

}  // namespace

ProblemSpec expand_divergence(const ProblemSpec& spec) {
  ProblemSpec out = spec;
  out.divergence_terms.clear();

  int order = spec.n;
  for (const auto& t : spec.divergence_terms) {
    if (t.outer < 0 || t.inner < 0)
      throw ValidationError(ValidationError::Kind::BadSpec,
                            "divergence term orders must be >= 0");
    order = std::max(order, t.outer + t.inner);
  }
  out.n = order;
  out.a.resize(order + 1);
  out.b.resize(order + 1);

  for (const auto& t : spec.divergence_terms) {
    for (int j = 0; j <= t.outer; ++j) {
      DistA contrib = scale(Scalar(binom(t.outer, j)),
                            derivative(t.coeff, t.outer - j));
      auto& target = (t.side == CoefSide::Left) ? out.a : out.b;
      target[t.inner + j] = add(target[t.inner + j], contrib);
    }
  }
  return out;
}

namespace detail {

namespace {

class RegularPartFn final : public SmoothFn {
 public:
  RegularPartFn(PiecewisePart pw, Interval home)
      : pw_(std::move(pw)), home_(home) {}

  Scalar eval(double x) const override { return piece(x)->eval(x); }
  std::vector<Scalar> jet(double x, int maxk) const override {
    return piece(x)->jet(x, maxk);
  }
  FnPtr derivative() const override {
    PiecewisePart d;
    d.breakpoints = pw_.breakpoints;
    for (const auto& p : pw_.pieces) d.pieces.push_back(p->derivative());
    return std::make_shared<RegularPartFn>(std::move(d), home_);
  }
  bool constant_value(Scalar* out) const override {
    if (pw_.breakpoints.empty()) return pw_.pieces[0]->constant_value(out);
    return false;
  }

 private:
  const FnPtr& piece(double x) const {
    double t = std::clamp(x, home_.lo, home_.hi);
    const auto& b = pw_.breakpoints;
    std::size_t idx;
    if (t == home_.hi)
      idx = std::lower_bound(b.begin(), b.end(), t) - b.begin();
    else
      idx = std::upper_bound(b.begin(), b.end(), t) - b.begin();
    return pw_.pieces[idx];
  }

  PiecewisePart pw_;
  Interval home_;
};

constexpr double kZeroTol = 1e-12;

}  // namespace

FnPtr regular_part_fn(const PiecewisePart& pw, Interval home) {
  if (pw.breakpoints.empty()) return pw.pieces[0];
  return std::make_shared<RegularPartFn>(pw, home);
}

LateralCoef lateral_coef(const DistA& coef, double x0) {
  LateralCoef out;
  const auto& b = coef.breakpoints();
  auto it = std::lower_bound(b.begin(), b.end(), x0);
  std::size_t idx = it - b.begin();
  if (it != b.end() && *it == x0) {
    out.left = coef.pieces()[idx];
    out.right = coef.pieces()[idx + 1];
  } else {
    out.left = out.right = coef.pieces()[idx];
  }
  for (const auto& [key, c] : coef.deltas().terms())
    if (key.first == x0) out.deltas.push_back({key.second, c});
  return out;
}

std::size_t Prepared::interval_of(double x) const {
  return std::upper_bound(points.begin(), points.end(), x) - points.begin();
}

Prepared prepare(const ProblemSpec& raw, bool build_interfaces) {
  Prepared p;
  p.spec = expand_divergence(raw);
  p.report = validate(p.spec);
  if (!p.report.ok) throw ValidationError(p.report.kind, p.report.message);

  // validate() leaves coefficients untouched; canonicalize once here.
  for (auto& c : p.spec.a) c = canonicalize(c);
  for (auto& c : p.spec.b) c = canonicalize(c);

  p.points = p.report.singular_points;
  const Interval dom = p.spec.domain;
  std::vector<double> edges;
  edges.push_back(dom.lo);
  edges.insert(edges.end(), p.points.begin(), p.points.end());
  edges.push_back(dom.hi);
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    Interval iv{edges[k], edges[k + 1]};
    p.intervals.push_back(iv);
    LocalOde ode;
    ode.n = p.spec.n;
    ode.rhs = make_fn(p.spec.f);
    for (int i = 0; i <= p.spec.n; ++i) {
      DistA sum = add(p.spec.a[i], p.spec.b[i]);
      ode.c.push_back(regular_part_fn(sum.piecewise_part(), iv));
    }
    p.odes.push_back(std::move(ode));
  }

  if (build_interfaces)
    for (double x0 : p.points) p.ifaces.push_back(build_interface_core(p, x0));
  return p;
}

}  // namespace detail

ValidationReport validate(const ProblemSpec& raw) {
  ValidationReport rep;
  rep.kind = ValidationError::Kind::BadSpec;
  ProblemSpec spec;
  try {
    spec = expand_divergence(raw);
  } catch (const ValidationError& e) {
    rep.message = e.what();
    return rep;
  }
  rep.n = spec.n;
  if (spec.n < 1) {
    rep.message = "order n must be >= 1";
    return rep;
  }
  if (!(std::isfinite(spec.domain.lo) && std::isfinite(spec.domain.hi) &&
        spec.domain.lo < spec.domain.hi)) {
    rep.message = "domain must be a finite interval with lo < hi";
    return rep;
  }
  if (int(spec.a.size()) > spec.n + 1 || int(spec.b.size()) > spec.n + 1) {
    rep.message = "coefficient list longer than n+1";
    return rep;
  }
  spec.a.resize(spec.n + 1);
  spec.b.resize(spec.n + 1);

  try {
    std::vector<DistA> ca, cb;
    for (const auto& c : spec.a) ca.push_back(canonicalize(c));
    for (const auto& c : spec.b) cb.push_back(canonicalize(c));

    // Singular points and the maximal coefficient order M, both restricted
    // to the open domain.
    std::vector<double> pts;
    int M = 0;
    for (const auto* list : {&ca, &cb}) {
      for (const auto& c : *list) {
        for (double x : sing_supp(c))
          if (spec.domain.contains(x)) pts.push_back(x);
        for (const auto& [key, coef] : c.deltas().terms())
          if (spec.domain.contains(key.first))
            M = std::max(M, key.second + 1);
      }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    rep.singular_points = pts;
    rep.max_coef_order = M;

    // Sectional regularity: the leading sum a_n + b_n must be bounded away
    // from zero on the closure of every regular interval, and all
    // coefficients plus f must be pole-free there.
    std::vector<double> edges;
    edges.push_back(spec.domain.lo);
    edges.insert(edges.end(), pts.begin(), pts.end());
    edges.push_back(spec.domain.hi);

    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      Interval iv{edges[k], edges[k + 1]};
      std::vector<FnPtr> cs;
      for (int i = 0; i <= spec.n; ++i)
        cs.push_back(detail::regular_part_fn(
            add(ca[i], cb[i]).piecewise_part(), iv));
      FnPtr rhs = make_fn(spec.f);

      const int samples = 129;
      double lead_min = kInf, lead_max = 0;
      for (int s = 0; s < samples; ++s) {
        double x = iv.lo + (iv.hi - iv.lo) * double(s) / double(samples - 1);
        for (int i = 0; i <= spec.n; ++i) {
          Scalar v = cs[i]->eval(x);  // throws EvalError at a pole
          if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw EvalError("coefficient not finite");
          if (i == spec.n) {
            lead_min = std::min(lead_min, std::abs(v));
            lead_max = std::max(lead_max, std::abs(v));
          }
        }
        Scalar fv = rhs->eval(x);
        if (!std::isfinite(fv.real()) || !std::isfinite(fv.imag()))
          throw EvalError("right-hand side not finite");
      }
      if (lead_min <= detail::kZeroTol * (1.0 + lead_max)) {
        rep.kind = ValidationError::Kind::SectionallySingular;
        rep.message = "leading coefficient a_n + b_n vanishes on [" +
                      std::to_string(iv.lo) + ", " + std::to_string(iv.hi) + "]";
        return rep;
      }
    }

    // Point conditions at each singular point.
    for (double x0 : pts) {
      auto an = detail::lateral_coef(ca[spec.n], x0);
      auto bn = detail::lateral_coef(cb[spec.n], x0);
      Scalar aL = an.left->eval(x0), aR = an.right->eval(x0);
      Scalar bL = bn.left->eval(x0), bR = bn.right->eval(x0);
      double scale = 1.0 + std::max({std::abs(aL), std::abs(aR), std::abs(bL),
                                     std::abs(bR)});
      auto degenerate = [&](Scalar v) {
        return std::abs(v) <= detail::kZeroTol * scale;
      };
      if (degenerate(aL + bR)) {
        rep.kind = ValidationError::Kind::DegenerateInterface;
        rep.message = "a_n-(x0) + b_n+(x0) = 0 at x0 = " + std::to_string(x0);
        return rep;
      }
      if (degenerate(aL + bL) || degenerate(aR + bR)) {
        rep.kind = ValidationError::Kind::DegenerateInterface;
        rep.message = "lateral leading sum vanishes at x0 = " + std::to_string(x0);
        return rep;
      }
    }
  } catch (const EvalError& e) {
    rep.kind = ValidationError::Kind::BadSpec;
    rep.message = std::string("coefficient evaluation failed: ") + e.what();
    return rep;
  }

  rep.ok = true;
  rep.message = "ok";
  return rep;
}

const char* to_cstring(InterfaceClass c) {
  switch (c) {
    case InterfaceClass::Separating: return "separating";
    case InterfaceClass::Interacting: return "interacting";
    case InterfaceClass::PartiallyInteracting: return "partially_interacting";
  }
  return "?";
}

const char* to_cstring(Existence e) {
  switch (e) {
    case Existence::Unique: return "unique";
    case Existence::AffineFamily: return "affine_family";
    case Existence::None: return "none";
  }
  return "?";
}

}  // namespace distrode
