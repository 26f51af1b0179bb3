#include "philap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace philap {

namespace {

// QUADPACK dqk15 abscissae/weights on [-1,1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelEval {
  double value;
  double error;
};

PanelEval gk15(const Integrand& f, double a, double b, long& evals) {
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - hw * kXgk[i]);
    fv[14 - i] = f(c + hw * kXgk[i]);
  }
  fv[7] = f(c);
  evals += 15;
  double resk = 0.0, resg = 0.0;
  for (int i = 0; i < 7; ++i) resk += kWgk[i] * (fv[i] + fv[14 - i]);
  resk += kWgk[7] * fv[7];
  for (int i = 0; i < 3; ++i) resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  resg += kWg[3] * fv[7];
  for (double v : fv)
    if (!std::isfinite(v)) throw EvalError("non-finite integrand value at an interior node");
  return {resk * hw, std::fabs((resk - resg) * hw)};
}

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, double tol,
                     const std::vector<SingularityHint>& hints, const QuadOptions& opts) {
  QuadResult out;
  if (!(a < b)) return {0.0, 0.0, 0, true};
  const double span = b - a;
  const double wmin = opts.min_panel_width * span;

  // Pre-split geometrically toward hinted endpoints so the first sweep
  // already resolves the singular layers.
  std::vector<double> cuts{a, b};
  for (const SingularityHint& hint : hints) {
    for (int k = 1; k <= 16; ++k) {
      double w = span * std::ldexp(1.0, -k);
      cuts.push_back(hint.side == SingularityHint::Side::left ? a + w : b - w);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel> queue;
  double total = 0.0, toterr = 0.0;
  long evals = 0;
  auto push_panel = [&](double lo, double hi) {
    PanelEval e = gk15(f, lo, hi, evals);
    queue.push({lo, hi, e.value, e.error});
    total += e.value;
    toterr += e.error;
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) push_panel(cuts[i], cuts[i + 1]);

  std::vector<Panel> frozen;
  int resum_counter = 0;
  while (toterr > tol * (1.0 + std::fabs(total))) {
    if (queue.empty() || evals >= opts.max_evaluations) break;
    Panel worst = queue.top();
    queue.pop();
    if (worst.b - worst.a <= 2.0 * wmin) {
      frozen.push_back(worst);
      continue;
    }
    total -= worst.value;
    toterr -= worst.error;
    double mid = 0.5 * (worst.a + worst.b);
    push_panel(worst.a, mid);
    push_panel(mid, worst.b);
    // Re-sum occasionally so incremental updates do not drift.
    if (++resum_counter % 256 == 0) {
      std::vector<Panel> all(frozen);
      std::priority_queue<Panel> copy = queue;
      while (!copy.empty()) {
        all.push_back(copy.top());
        copy.pop();
      }
      total = toterr = 0.0;
      for (const Panel& p : all) {
        total += p.value;
        toterr += p.error;
      }
    }
  }
  // Frozen panels keep contributing to the error estimate; if they dominate
  // the tolerance the result is reported as not converged.
  out.value = total;
  out.error_estimate = toterr;
  out.evaluations = evals;
  out.converged = toterr <= tol * (1.0 + std::fabs(total));
  return out;
}

CumulativeIntegral::CumulativeIntegral(Integrand h, double anchor, double tol,
                                       std::vector<SingularityHint> hints)
    : h_(std::move(h)), tol_(tol), hints_(std::move(hints)) {
  known_[anchor] = 0.0;
}

double CumulativeIntegral::operator()(double s) const {
  auto it = known_.find(s);
  if (it != known_.end()) return it->second;
  // nearest cached point
  auto hi = known_.lower_bound(s);
  double s0, v0;
  if (hi == known_.end()) {
    auto last = std::prev(hi);
    s0 = last->first;
    v0 = last->second;
  } else if (hi == known_.begin()) {
    s0 = hi->first;
    v0 = hi->second;
  } else {
    auto lo = std::prev(hi);
    if (s - lo->first <= hi->first - s) {
      s0 = lo->first;
      v0 = lo->second;
    } else {
      s0 = hi->first;
      v0 = hi->second;
    }
  }
  double lo_t = std::min(s, s0), hi_t = std::max(s, s0);
  QuadOptions opts;
  opts.max_evaluations = 40000;
  QuadResult gap = integrate(h_, lo_t, hi_t, tol_, hints_, opts);
  evals_ += gap.evaluations;
  err_ += gap.error_estimate;
  double v = v0 + (s >= s0 ? gap.value : -gap.value);
  known_[s] = v;
  return v;
}

QuadResult nested_weight_integral(const std::function<double(double)>& xi_inverse,
                                  const Integrand& h, double anchor, AnchorSide side,
                                  double outer_lo, double outer_hi, double tol,
                                  const std::vector<SingularityHint>& hints) {
  CumulativeIntegral inner(h, anchor, std::max(tol * 0.1, 1e-15), hints);
  Integrand outer = [&](double s) {
    double raw = (side == AnchorSide::left_of_anchor) ? -inner(s) : inner(s);
    // tiny negative values are quadrature noise on a nonnegative weight
    return xi_inverse(std::max(raw, 0.0));
  };
  QuadResult r = integrate(outer, outer_lo, outer_hi, tol, hints);
  r.evaluations += inner.evaluations();
  return r;
}

namespace {

// Shared increment classifier: level_value(k) must return the integral with
// endpoint cutoff eps_k = 2^-k. Verdicts follow the 8-level rule described
// in the header.
Membership classify_increments(const std::function<double(int)>& level_value, double tol,
                               int k_lo, int k_hi) {
  double prev = level_value(k_lo);
  std::vector<double> deltas;
  int calm = 0;
  for (int k = k_lo + 1; k <= k_hi; ++k) {
    double cur = level_value(k);
    double delta = std::max(cur - prev, 0.0);
    deltas.push_back(delta);
    prev = cur;
    if (delta <= tol * (1.0 + std::fabs(cur))) {
      if (++calm >= 3) return Membership::member;
    } else {
      calm = 0;
    }
    if (deltas.size() >= 8) {
      bool growing = true, flat = true;
      double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
      for (std::size_t i = deltas.size() - 8; i < deltas.size(); ++i) {
        dmax = std::max(dmax, deltas[i]);
        dmin = std::min(dmin, deltas[i]);
        if (i > deltas.size() - 8 && deltas[i] <= deltas[i - 1]) growing = false;
      }
      flat = dmin > tol * (1.0 + std::fabs(cur)) && dmin >= 0.25 * dmax;
      if (growing || flat) return Membership::nonmember;
    }
  }
  return Membership::inconclusive;
}

}  // namespace

Membership classify_membership(const Integrand& h,
                               const std::function<double(double)>& xi_inverse,
                               double tol, const std::vector<SingularityHint>& hints) {
  const double anchor = 0.5;
  CumulativeIntegral inner(h, anchor, std::max(tol * 1e-3, 1e-15), hints);
  auto outer_left = [&](double s) { return xi_inverse(std::max(-inner(s), 0.0)); };
  auto outer_right = [&](double s) { return xi_inverse(std::max(inner(s), 0.0)); };
  // Level k integrates over [eps_k, 1/2] and [1/2, 1-eps_k]; increments are
  // the freshly exposed slices, so levels share all earlier work.
  double acc = 0.0;
  int last_k = 0;
  auto level = [&](int k) {
    double eps = std::ldexp(1.0, -k);
    double lo_prev = last_k == 0 ? anchor : std::ldexp(1.0, -last_k);
    QuadResult a = integrate(outer_left, eps, lo_prev, tol * 0.1, hints);
    QuadResult b = integrate(outer_right, 1.0 - lo_prev, 1.0 - eps, tol * 0.1, hints);
    acc += a.value + b.value;
    last_k = k;
    return acc;
  };
  return classify_increments(level, tol, 2, 44);
}

Membership classify_l1(const Integrand& h, double tol,
                       const std::vector<SingularityHint>& hints) {
  double acc = 0.0;
  int last_k = 0;
  auto level = [&](int k) {
    double eps = std::ldexp(1.0, -k);
    double lo_prev = last_k == 0 ? 0.5 : std::ldexp(1.0, -last_k);
    QuadResult a = integrate(h, eps, lo_prev, tol * 0.1, hints);
    QuadResult b = integrate(h, 1.0 - lo_prev, 1.0 - eps, tol * 0.1, hints);
    acc += a.value + b.value;
    last_k = k;
    return acc;
  };
  return classify_increments(level, tol, 2, 44);
}

}  // namespace philap
