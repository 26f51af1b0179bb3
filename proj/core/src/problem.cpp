#include "philap/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace philap {

namespace {

constexpr double kGolden = 0.6180339887498949;

// golden-section refinement of an extremum bracketed by grid neighbors
template <typename F>
double golden_extremum(F&& f, double a, double b, bool maximize, int iters = 60) {
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters && (b - a) > 1e-14 * (1.0 + std::fabs(a) + std::fabs(b)); ++i) {
    bool keep_left = maximize ? (f1 > f2) : (f1 < f2);
    if (keep_left) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    }
  }
  return maximize ? std::max(f1, f2) : std::min(f1, f2);
}

// grid extrema with local golden refinement around the best nodes
struct Extrema {
  double min_v, max_v;
};

Extrema grid_extrema(const Expression& g, int n_nodes) {
  double best_min = std::numeric_limits<double>::infinity();
  double best_max = -best_min;
  int imin = 0, imax = 0;
  std::vector<double> vals(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    double t = static_cast<double>(i) / (n_nodes - 1);
    vals[i] = g(t);
    if (vals[i] < best_min) {
      best_min = vals[i];
      imin = i;
    }
    if (vals[i] > best_max) {
      best_max = vals[i];
      imax = i;
    }
  }
  auto bracket = [&](int i) {
    double lo = std::max(0.0, (static_cast<double>(i) - 1.0) / (n_nodes - 1));
    double hi = std::min(1.0, (static_cast<double>(i) + 1.0) / (n_nodes - 1));
    return std::pair{lo, hi};
  };
  auto [alo, ahi] = bracket(imin);
  best_min = std::min(best_min, golden_extremum([&](double t) { return g(t); }, alo, ahi, false));
  auto [blo, bhi] = bracket(imax);
  best_max = std::max(best_max, golden_extremum([&](double t) { return g(t); }, blo, bhi, true));
  return {best_min, best_max};
}

double eval_weight_or_zero(const Expression& h, double t) {
  // endpoint poles surface as EvalError; treat as "positive" for support
  // scanning purposes by reporting infinity
  try {
    return h(t);
  } catch (const EvalError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

WeightProfile analyze_weight(const Expression& h, const std::optional<SupportHints>& hints,
                             double zero_threshold) {
  constexpr int kN = 4097;  // interior scan nodes at i/(kN-1), i=1..kN-2
  std::vector<double> t(kN), v(kN);
  double scale = 0.0;
  for (int i = 1; i < kN - 1; ++i) {
    t[i] = static_cast<double>(i) / (kN - 1);
    v[i] = eval_weight_or_zero(h, t[i]);
    if (v[i] < 0.0) throw InvariantError("weight must be nonnegative");
    if (std::isfinite(v[i])) scale = std::max(scale, v[i]);
  }
  if (scale == 0.0) throw InvariantError("weight vanishes identically on the scan grid");
  auto is_zero = [&](double val) { return std::fabs(val) < zero_threshold * (1.0 + scale); };
  auto is_zero_at = [&](double x) { return is_zero(eval_weight_or_zero(h, x)); };

  // bisect a zero/positive transition inside (a,b); `zero_left` says which
  // side of the transition is the zero side
  auto refine = [&](double a, double b, bool zero_left) {
    for (int it = 0; it < 60 && (b - a) > 1e-9; ++it) {
      double m = 0.5 * (a + b);
      bool z = is_zero_at(m);
      if (z == zero_left)
        a = m;
      else
        b = m;
    }
    return 0.5 * (a + b);
  };

  WeightProfile p;
  if (hints) {
    p.alpha = hints->alpha;
    p.alpha_bar = hints->alpha_bar;
    p.beta_bar = hints->beta_bar;
    p.beta = hints->beta;
    p.declared = true;
    // spot-validate the declared structure
    auto expect = [&](double lo, double hi, bool zero) {
      if (!(hi - lo > 1e-12)) return;
      for (int i = 1; i <= 64; ++i) {
        double x = lo + (hi - lo) * i / 65.0;
        if (is_zero_at(x) != zero)
          throw InvariantError("declared weight support is inconsistent with samples");
      }
    };
    expect(0.0, p.alpha, true);
    expect(p.alpha, p.alpha_bar, false);
    expect(p.beta_bar, p.beta, false);
    expect(p.beta, 1.0, true);
  } else {
    int first_pos = -1, last_pos = -1;
    for (int i = 1; i < kN - 1; ++i)
      if (!is_zero(v[i])) {
        if (first_pos < 0) first_pos = i;
        last_pos = i;
      }
    // alpha: end of the leading zero run
    if (first_pos == 1) {
      p.alpha = 0.0;
    } else {
      p.alpha = refine(t[first_pos - 1], t[first_pos], true);
    }
    // alpha_bar: end of the positive run starting after alpha
    int i = first_pos;
    while (i < kN - 1 && !is_zero(v[i])) ++i;
    p.alpha_bar = (i >= kN - 1) ? 1.0 : refine(t[i - 1], t[i], false);
    // beta: start of the trailing zero run
    if (last_pos == kN - 2) {
      p.beta = 1.0;
    } else {
      p.beta = refine(t[last_pos], t[last_pos + 1], false);
    }
    // beta_bar: infimum of x with h > 0 throughout (x, beta)
    int j = last_pos;
    while (j > 0 && !is_zero(v[j])) --j;
    p.beta_bar = (j <= 0) ? 0.0 : refine(t[j], t[j + 1], true);
  }

  p.gamma1 = (3.0 * p.alpha + p.alpha_bar) / 4.0;
  p.gamma2 = (p.beta_bar + 3.0 * p.beta) / 4.0;
  p.gamma = 0.5 * (p.gamma1 + p.gamma2);
  if (!(0.0 <= p.alpha && p.alpha < p.gamma1 && p.gamma1 < p.gamma && p.gamma < p.gamma2 &&
        p.gamma2 < p.beta && p.beta <= 1.0))
    throw InvariantError("weight support ordering is violated");
  return p;
}

ReducedForms reduce_annular(const Expression& w, const Expression& A, const Expression& k,
                            double R1, double R2, int N) {
  if (!(0.0 < R1 && R1 < R2) || !std::isfinite(R2))
    throw InvariantError("annulus radii must satisfy 0 < R1 < R2 < inf");
  if (N < 2) throw InvariantError("annulus dimension must be >= 2");
  char buf[128];
  std::snprintf(buf, sizeof(buf), "(%.17g*t+%.17g)", R2 - R1, R1);
  const std::string r(buf);
  std::snprintf(buf, sizeof(buf), "%.17g", R2 - R1);
  const std::string span(buf);
  std::snprintf(buf, sizeof(buf), "%.17g", 1.0 / (R2 - R1));
  const std::string inv_span(buf);
  std::snprintf(buf, sizeof(buf), "%d", N - 1);
  const std::string nm1(buf);

  ReducedForms out;
  out.phi_src = "(" + substitute_identifier(A.source(), A.variable(), "x") + ")*x";
  out.c_src = inv_span;
  out.d_src = "(" + substitute_identifier(w.source(), w.variable(), r) + ")*" + r + "^" + nm1;
  out.h_src = span + "*" + r + "^" + nm1 + "*(" +
              substitute_identifier(k.source(), k.variable(), r) + ")";
  return out;
}

ProblemInstance::ProblemInstance(HomeoBundle homeo, Expression c, Expression d, Expression h,
                                 Expression f, std::vector<SingularityHint> weight_hints,
                                 std::optional<SupportHints> support, double quad_tol)
    : homeo_(std::move(homeo)), c_(std::move(c)), d_(std::move(d)), h_(std::move(h)),
      f_(std::move(f)), hints_(std::move(weight_hints)), quad_tol_(quad_tol) {
  if (!(quad_tol_ > 0.0)) throw InvariantError("quadrature tolerance must be positive");

  // positivity of c,d on a 1025-point grid, extrema refined locally
  Extrema ce = grid_extrema(c_, 1025);
  Extrema de = grid_extrema(d_, 1025);
  if (!(ce.min_v > 0.0)) throw InvariantError("coefficient c must be strictly positive");
  if (!(de.min_v > 0.0)) throw InvariantError("coefficient d must be strictly positive");
  c0_ = ce.min_v;
  cmax_ = ce.max_v;
  d0_ = de.min_v;
  dmax_ = de.max_v;

  // nonlinearity sign invariants on a log grid
  if (f_(0.0) < 0.0) throw InvariantError("f(0) must be nonnegative");
  for (int i = 0; i <= 128; ++i) {
    double s = std::pow(10.0, -8.0 + 16.0 * i / 128.0);
    if (!(f_(s) > 0.0)) throw InvariantError("f must be positive for positive arguments");
  }

  profile_ = analyze_weight(h_, support);

  // rho1 = (c0/||c||) * psi2^-1(1/||d||) / psi1^-1(1/d0)
  consts_.rho1 = (c0_ / cmax_) * homeo_.psi2_inverse(1.0 / dmax_) /
                 homeo_.psi1_inverse(1.0 / d0_);
  consts_.gamma0 = std::min(profile_.gamma1, 1.0 - profile_.gamma2);
  consts_.rho_h = consts_.rho1 * consts_.gamma0;

  auto hfun = [this](double t) { return h_(t); };
  auto psi1_inv = [this](double y) { return homeo_.psi1_inverse(y); };
  auto psi2_inv = [this](double y) { return homeo_.psi2_inverse(y); };
  const double g1 = profile_.gamma1, g2 = profile_.gamma2, g = profile_.gamma;

  QuadResult a1l = nested_weight_integral(psi2_inv, hfun, g, AnchorSide::left_of_anchor,
                                          g1, g, quad_tol_, hints_);
  QuadResult a1r = nested_weight_integral(psi2_inv, hfun, g, AnchorSide::right_of_anchor,
                                          g, g2, quad_tol_, hints_);
  if (!a1l.converged || !a1r.converged)
    throw NumericalError("core nested integrals did not converge");
  double a1scale = (1.0 / cmax_) * homeo_.psi2_inverse(1.0 / dmax_);
  const QuadResult& a1pick = a1l.value <= a1r.value ? a1l : a1r;
  consts_.A1 = {a1scale * a1pick.value, a1scale * a1pick.error_estimate};

  QuadResult a2l = nested_weight_integral(psi1_inv, hfun, g, AnchorSide::left_of_anchor,
                                          0.0, g, quad_tol_, hints_);
  QuadResult a2r = nested_weight_integral(psi1_inv, hfun, g, AnchorSide::right_of_anchor,
                                          g, 1.0, quad_tol_, hints_);
  if (!a2l.converged || !a2r.converged)
    throw NumericalError(
        "endpoint nested integrals diverge; the weight is outside the admissible class");
  const QuadResult& a2pick = a2l.value >= a2r.value ? a2l : a2r;
  consts_.h_upper = {a2pick.value, a2pick.error_estimate};
  double a2scale = (1.0 / c0_) * homeo_.psi1_inverse(1.0 / d0_);
  consts_.A2 = {a2scale * a2pick.value, a2scale * a2pick.error_estimate};

  QuadResult hsl = integrate(hfun, g1, g, quad_tol_, hints_);
  QuadResult hsr = integrate(hfun, g, g2, quad_tol_, hints_);
  if (!hsl.converged || !hsr.converged)
    throw NumericalError("core weight integrals did not converge");
  const QuadResult& hspick = hsl.value <= hsr.value ? hsl : hsr;
  consts_.h_star = {hspick.value, hspick.error_estimate};

  if (!(consts_.A1.value > 0.0) || !(consts_.A1.value < consts_.A2.value))
    throw InvariantError("constant ordering 0 < A1 < A2 failed");
}

double ProblemInstance::h(double t) const { return h_(t); }

std::pair<double, double> ProblemInstance::f_envelopes(double m) const {
  if (!(m > 0.0)) throw InvariantError("envelope argument must be positive");
  const double lo = consts_.rho_h * m;

  // sampled min over [rho_h m, m] with golden refinement around the best node
  constexpr int kSamples = 257;
  auto sampled_extremum = [&](double a, double b, bool maximize) {
    double best = maximize ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity();
    int ibest = 0;
    for (int i = 0; i < kSamples; ++i) {
      double s = a + (b - a) * i / (kSamples - 1);
      double val = f_(s);
      if (maximize ? (val > best) : (val < best)) {
        best = val;
        ibest = i;
      }
    }
    double ra = a + (b - a) * std::max(0, ibest - 1) / (kSamples - 1);
    double rb = a + (b - a) * std::min(kSamples - 1, ibest + 1) / (kSamples - 1);
    double refined = golden_extremum([&](double s) { return f_(s); }, ra, rb, maximize);
    return maximize ? std::max(best, refined) : std::min(best, refined);
  };

  double fstar = sampled_extremum(lo, m, false);

  double fupper;
  {
    std::lock_guard<std::mutex> lock(env_mu_);
    auto it = fupper_memo_.upper_bound(m);
    double base_m = 0.0, base_v = f_(0.0);
    if (it != fupper_memo_.begin()) {
      auto prev = std::prev(it);
      base_m = prev->first;
      base_v = prev->second;
    }
    if (base_m == m) {
      fupper = base_v;
    } else {
      fupper = std::max(base_v, sampled_extremum(base_m, m, true));
      fupper_memo_[m] = fupper;
    }
  }
  return {fstar, fupper};
}

std::pair<double, double> ProblemInstance::R_curves(double m) const {
  auto [fstar, fupper] = f_envelopes(m);
  if (!(fstar > 0.0)) throw InvariantError("f vanishes on the envelope interval");
  double r1 = homeo_.phi(m / consts_.A1.value) / fstar;
  double r2 = homeo_.phi(m / consts_.A2.value) / fupper;
  return {r1, r2};
}

namespace {

FLimit classify_ratio_trend(const std::vector<double>& r) {
  // r sampled one decade apart, ordered toward the limit
  const std::size_t n = r.size();
  FLimit out;
  double growth = r[n - 1] / r[n - 5];  // across the last 4 decades
  if (growth >= 10.0) {
    out.cls = LimitClass::infinite;
    return out;
  }
  if (growth <= 0.1) {
    out.cls = LimitClass::zero;
    out.value = 0.0;
    return out;
  }
  double c1 = std::fabs(r[n - 1] - r[n - 2]) / (std::fabs(r[n - 1]) + 1e-300);
  double c2 = std::fabs(r[n - 2] - r[n - 3]) / (std::fabs(r[n - 2]) + 1e-300);
  if (c1 < 1e-3 && c2 < 1e-3) {
    out.cls = LimitClass::finite;
    // Aitken extrapolation of the tail
    double d1 = r[n - 2] - r[n - 3], d2 = r[n - 1] - r[n - 2];
    double denom = d2 - d1;
    out.value = std::fabs(denom) > 1e-14 * std::fabs(r[n - 1])
                    ? r[n - 1] - d2 * d2 / denom
                    : r[n - 1];
    return out;
  }
  out.cls = LimitClass::inconclusive;
  return out;
}

}  // namespace

FLimits ProblemInstance::f_limits() const {
  {
    std::lock_guard<std::mutex> lock(env_mu_);
    if (flimits_memo_) return *flimits_memo_;
  }
  std::vector<double> toward0, towardInf;
  for (int k = 1; k <= 12; ++k) {
    double s0 = std::pow(10.0, -k);
    double s1 = std::pow(10.0, k);
    toward0.push_back(f_(s0) / homeo_.phi(s0));
    towardInf.push_back(f_(s1) / homeo_.phi(s1));
  }
  FLimits out{classify_ratio_trend(toward0), classify_ratio_trend(towardInf)};
  std::lock_guard<std::mutex> lock(env_mu_);
  flimits_memo_ = out;
  return out;
}

Membership ProblemInstance::h_membership_psi1(double tol) const {
  auto hfun = [this](double t) { return h_(t); };
  auto psi1_inv = [this](double y) { return homeo_.psi1_inverse(y); };
  return classify_membership(hfun, psi1_inv, tol, hints_);
}

Membership ProblemInstance::h_membership_l1(double tol) const {
  auto hfun = [this](double t) { return h_(t); };
  return classify_l1(hfun, tol, hints_);
}

}  // namespace philap
