#include "philap/homeo.hpp"

#include <algorithm>
#include <cmath>

namespace philap {

namespace {

std::vector<double> log_samples(double lo, double hi, int n) {
  std::vector<double> out(n);
  double llo = std::log10(lo), lhi = std::log10(hi);
  for (int i = 0; i < n; ++i)
    out[i] = std::pow(10.0, llo + (lhi - llo) * i / (n - 1));
  return out;
}

}  // namespace

HomeoBundle::HomeoBundle(Expression phi, Expression psi1, Expression psi2,
                         double inverse_tolerance, double bracket_growth)
    : phi_(std::move(phi)), psi1_(std::move(psi1)), psi2_(std::move(psi2)),
      inverse_tolerance_(inverse_tolerance), bracket_growth_(bracket_growth) {
  if (inverse_tolerance_ <= 0.0) throw InvariantError("inverse tolerance must be positive");
  if (bracket_growth_ <= 1.0) throw InvariantError("bracket growth must exceed 1");
  for (Which w : {Which::phi, Which::psi1, Which::psi2}) {
    const char* name = w == Which::phi ? "phi" : (w == Which::psi1 ? "psi1" : "psi2");
    double at0 = eval_raw(w, 0.0);
    if (std::fabs(at0) > 1e-12)
      throw InvariantError(std::string(name) + " must vanish at 0");
    // strict monotonicity spot-check, 1024 log-spaced points
    std::vector<double> grid = log_samples(1e-9, 1e9, 1024);
    double prev = at0, prev_x = 0.0;
    for (double x : grid) {
      double v = eval_raw(w, x);
      if (!(v > prev))
        throw InvariantError(std::string(name) + " is not strictly increasing near x=" +
                             std::to_string(prev_x));
      prev = v;
      prev_x = x;
    }
  }
}

double HomeoBundle::eval_raw(Which which, double x) const {
  switch (which) {
    case Which::phi:
      return phi_(x);
    case Which::psi1:
      return psi1_(x);
    case Which::psi2:
      return psi2_(x);
  }
  throw EvalError("bad homeomorphism selector");
}

double HomeoBundle::phi(double x) const {
  if (x < 0.0) return -phi_(-x);
  return phi_(x);
}

double HomeoBundle::psi1(double y) const { return psi1_(y); }
double HomeoBundle::psi2(double y) const { return psi2_(y); }

double HomeoBundle::invert(Which which, double y) const {
  return invert_impl(which, y, 0.0);
}

double HomeoBundle::invert_tight(Which which, double y) const {
  return invert_impl(which, y, 1e-13);
}

double HomeoBundle::invert_impl(Which which, double y, double x_rtol) const {
  if (which == Which::phi && y < 0.0) return -invert_impl(which, -y, x_rtol);
  if (y < 0.0) throw EvalError("psi inverses need a nonnegative argument");
  if (y == 0.0) return 0.0;

  auto F = [&](double x) {
    return which == Which::phi ? phi(x) : eval_raw(which, x);
  };
  const double tol = inverse_tolerance_ * (1.0 + std::fabs(y));

  double lo = 0.0, flo = 0.0;
  double hi = 1.0, fhi = F(hi);
  int guard = 0;
  while (fhi < y) {
    lo = hi;
    flo = fhi;
    hi *= bracket_growth_;
    fhi = F(hi);
    if (++guard > 4000 || hi > 1e300)
      throw NumericalError("bracket expansion failed; function may not be surjective");
  }

  // safeguarded secant with forced bisection every other step
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 300; ++it) {
    bool use_secant = (it % 2 == 0) && fhi > flo;
    if (use_secant) {
      x = lo + (y - flo) * (hi - lo) / (fhi - flo);
      if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    } else {
      x = 0.5 * (lo + hi);
    }
    double fx = F(x);
    bool value_ok = std::fabs(fx - y) <= tol;
    bool width_ok = x_rtol <= 0.0 || (hi - lo) <= x_rtol * (std::fabs(lo) + std::fabs(hi));
    if (value_ok && width_ok) return x;
    if (fx < y) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
    if (hi - lo <= 1e-16 * (std::fabs(lo) + std::fabs(hi)) + 5e-324) break;
  }
  double mid = 0.5 * (lo + hi);
  if (std::fabs(F(mid) - y) <= 1e3 * tol) return mid;
  throw NumericalError("monotone inversion failed to meet tolerance (non-monotone input?)");
}

std::vector<std::pair<double, double>> HomeoBundle::default_lattice() {
  std::vector<double> axis = log_samples(1e-6, 1e6, 64);
  for (double extra : {1e-9, 1e-8, 1e7, 1e8}) axis.push_back(extra);
  std::sort(axis.begin(), axis.end());
  std::vector<std::pair<double, double>> lattice;
  lattice.reserve(axis.size() * axis.size());
  for (double x : axis)
    for (double y : axis) lattice.emplace_back(x, y);
  return lattice;
}

CheckReport HomeoBundle::check_condition_A(
    const std::vector<std::pair<double, double>>& lattice, double tol) const {
  CheckReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (auto [x, y] : lattice) {
    double pxy = phi(x * y);
    double px = phi(x);
    double lower = px * psi1(y);
    double upper = px * psi2(y);
    double scale = std::max({std::fabs(pxy), std::fabs(lower), std::fabs(upper), 1e-300});
    double m = std::min((pxy - lower) / scale, (upper - pxy) / scale);
    if (m < rep.worst_margin) {
      rep.worst_margin = m;
      rep.worst_x = x;
      rep.worst_y = y;
    }
    ++rep.points_checked;
  }
  rep.pass = rep.worst_margin >= -tol;
  return rep;
}

CheckReport HomeoBundle::check_condition_A(double tol) const {
  return check_condition_A(default_lattice(), tol);
}

CheckReport HomeoBundle::check_inverse_sandwich(
    const std::vector<std::pair<double, double>>& lattice, double tol) const {
  CheckReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (auto [x, y] : lattice) {
    double ixy = invert_tight(Which::phi, x * y);
    double ix = invert_tight(Which::phi, x);
    double lower = ix * invert_tight(Which::psi2, y);
    double upper = ix * invert_tight(Which::psi1, y);
    double scale = std::max({std::fabs(ixy), std::fabs(lower), std::fabs(upper), 1e-300});
    double m = std::min((ixy - lower) / scale, (upper - ixy) / scale);
    if (m < rep.worst_margin) {
      rep.worst_margin = m;
      rep.worst_x = x;
      rep.worst_y = y;
    }
    ++rep.points_checked;
  }
  // inversion itself is only tol-accurate, so allow that slack on top
  rep.pass = rep.worst_margin >= -(tol + 16.0 * inverse_tolerance_);
  return rep;
}

CheckReport HomeoBundle::check_inverse_sandwich(double tol) const {
  return check_inverse_sandwich(default_lattice(), tol);
}

}  // namespace philap
