#include "philap/solution_operator.hpp"

#include <algorithm>
#include <cmath>

namespace philap {

namespace {

// shared machinery: signed antiderivative of g plus the two branch integrals
struct NuEvaluator {
  const ProblemInstance& inst;
  CumulativeIntegral prim;  // integral_{1/2}^{s} g
  double tol;

  NuEvaluator(const ProblemInstance& i, const Integrand& g)
      : inst(i), prim(g, 0.5, std::max(i.quad_tol() * 0.1, 1e-15), i.weight_hints()),
        tol(i.quad_tol()) {}

  // integral_s^t g for s <= t
  double mass(double s, double t) const { return prim(t) - prim(s); }

  double branch_left(double t) const {
    Integrand f = [&](double s) {
      double w = std::max(mass(s, t), 0.0);
      return (1.0 / inst.c(s)) * inst.homeo().phi_inverse(w / inst.d(s));
    };
    return integrate(f, 0.0, t, tol, inst.weight_hints()).value;
  }

  double branch_right(double t) const {
    Integrand f = [&](double s) {
      double w = std::max(mass(t, s), 0.0);
      return (1.0 / inst.c(s)) * inst.homeo().phi_inverse(w / inst.d(s));
    };
    return integrate(f, t, 1.0, tol, inst.weight_hints()).value;
  }

  double operator()(double t) const { return branch_left(t) - branch_right(t); }
};

}  // namespace

double nu(const ProblemInstance& inst, const Integrand& g, double t) {
  if (!(t > 0.0 && t < 1.0)) throw InvariantError("nu is defined on (0,1)");
  return NuEvaluator(inst, g)(t);
}

namespace {

SigmaResult find_sigma_impl(const ProblemInstance& inst, const NuEvaluator& nu_ev,
                            const SigmaOptions& opts) {
  const double lo0 = opts.boundary_clip, hi0 = 1.0 - opts.boundary_clip;
  double nlo = nu_ev(lo0), nhi = nu_ev(hi0);
  const double scale = std::max({std::fabs(nlo), std::fabs(nhi), 1e-300});
  const double tol = opts.tol * scale;
  if (nlo > tol || nhi < -tol)
    throw NumericalError("nu has no sign change; source may vanish or quadrature failed");

  // nu is nondecreasing: locate sup{t: nu < -tol} and inf{t: nu > +tol}
  auto bisect = [&](double target_sign) {
    double a = lo0, b = hi0;
    for (int it = 0; it < 64 && (b - a) > 1e-13; ++it) {
      double m = 0.5 * (a + b);
      double v = nu_ev(m);
      bool left_of_edge = target_sign < 0.0 ? (v < -tol) : (v <= tol);
      if (left_of_edge)
        a = m;
      else
        b = m;
    }
    return 0.5 * (a + b);
  };
  double edge_lo = bisect(-1.0);  // last point clearly negative
  double edge_hi = bisect(+1.0);  // first point clearly positive

  SigmaResult out;
  if (edge_hi - edge_lo > opts.plateau_width) {
    out.zero_interval = {edge_lo, edge_hi};
    out.sigma = 0.5 * (edge_lo + edge_hi);
  } else {
    out.sigma = 0.5 * (edge_lo + edge_hi);
  }
  out.residual = std::fabs(nu_ev(out.sigma));
  if (out.residual > 1e3 * tol + 1e-14 * scale)
    throw NumericalError("sigma bisection failed to reduce nu below tolerance");
  return out;
}

}  // namespace

SigmaResult find_sigma(const ProblemInstance& inst, const Integrand& g,
                       const SigmaOptions& opts) {
  NuEvaluator nu_ev(inst, g);
  return find_sigma_impl(inst, nu_ev, opts);
}

GridFunction apply_T(const ProblemInstance& inst, const Integrand& g,
                     std::span<const double> mesh, const SigmaOptions& opts) {
  std::vector<double> nodes(mesh.begin(), mesh.end());

  NuEvaluator nu_ev(inst, g);
  // a source with no mass maps to the zero function
  double total_mass = nu_ev.mass(0.0 + 1e-12, 1.0 - 1e-12);
  double mass_scale = std::fabs(nu_ev.prim(1.0 - 1e-12)) + std::fabs(nu_ev.prim(1e-12));
  if (total_mass <= 1e-14 * (1.0 + mass_scale)) return GridFunction::zero(std::move(nodes));

  SigmaResult sig = find_sigma_impl(inst, nu_ev, opts);
  const double sigma = sig.sigma;

  bool have_sigma = false;
  for (double tnode : nodes)
    if (std::fabs(tnode - sigma) < 1e-12) have_sigma = true;
  if (!have_sigma) {
    nodes.push_back(sigma);
    std::sort(nodes.begin(), nodes.end());
  }

  std::vector<double> values(nodes.size(), 0.0);
  const double tol = inst.quad_tol();

  Integrand up_left = [&](double s) {
    double w = std::max(nu_ev.mass(s, sigma), 0.0);
    return (1.0 / inst.c(s)) * inst.homeo().phi_inverse(w / inst.d(s));
  };
  Integrand up_right = [&](double s) {
    double w = std::max(nu_ev.mass(sigma, s), 0.0);
    return (1.0 / inst.c(s)) * inst.homeo().phi_inverse(w / inst.d(s));
  };

  // cumulative sweep 0 -> sigma
  double acc = 0.0, prev = 0.0;
  for (std::size_t i = 1; i < nodes.size() && nodes[i] <= sigma; ++i) {
    acc += integrate(up_left, prev, nodes[i], tol, inst.weight_hints()).value;
    values[i] = acc;
    prev = nodes[i];
  }
  // cumulative sweep 1 -> sigma
  acc = 0.0;
  prev = 1.0;
  for (std::size_t ri = nodes.size() - 1; ri > 0; --ri) {
    std::size_t i = ri - 1;
    if (nodes[i] <= sigma) break;
    acc += integrate(up_right, nodes[i], prev, tol, inst.weight_hints()).value;
    values[i] = acc;
    prev = nodes[i];
  }
  values.front() = 0.0;
  values.back() = 0.0;
  return GridFunction(std::move(nodes), std::move(values));
}

GridFunction apply_H(const ProblemInstance& inst, double lambda, const GridFunction& u,
                     const SigmaOptions& opts) {
  if (lambda < 0.0) throw InvariantError("lambda must be nonnegative");
  if (lambda == 0.0) return GridFunction::zero(u.nodes());
  Integrand g = [&](double t) {
    return lambda * inst.h(t) * inst.f(std::max(u(t), 0.0));
  };
  return apply_T(inst, g, u.nodes(), opts);
}

double cone_margin(const ProblemInstance& inst, const GridFunction& u, ConeMode mode) {
  const double norm = u.sup_norm();
  double margin = std::numeric_limits<double>::infinity();
  const auto& nodes = u.nodes();
  const auto& vals = u.values();
  if (mode == ConeMode::lemma21) {
    const double rho1 = inst.constants().rho1;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      double bound = std::min(nodes[i], 1.0 - nodes[i]) * rho1 * norm;
      margin = std::min(margin, vals[i] - bound);
    }
  } else {
    const double rho_h = inst.constants().rho_h;
    const auto& p = inst.profile();
    bool any = false;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i] < p.gamma1 || nodes[i] > p.gamma2) continue;
      any = true;
      margin = std::min(margin, vals[i] - rho_h * norm);
    }
    // the core interval always contains gamma; interpolate if no node fell in
    if (!any) margin = u(inst.profile().gamma) - rho_h * norm;
  }
  return margin;
}

ResidualReport residual(const ProblemInstance& inst, double lambda, const GridFunction& u,
                        const SigmaOptions& opts) {
  ResidualReport rep;
  GridFunction hu = apply_H(inst, lambda, u, opts);
  const auto& nodes = u.nodes();
  const auto& vals = u.values();
  for (std::size_t i = 0; i < nodes.size(); ++i)
    rep.sup_residual = std::max(rep.sup_residual, std::fabs(vals[i] - hu(nodes[i])));

  if (lambda == 0.0) return rep;

  // flux defect: d*phi(c*u') should equal the remaining source mass up to the
  // peak; u' from 3-point differences, skipping the two nodes nearest each
  // endpoint where u' may be unbounded
  Integrand g = [&](double t) { return lambda * inst.h(t) * inst.f(std::max(u(t), 0.0)); };
  CumulativeIntegral prim(g, 0.5, std::max(inst.quad_tol() * 0.1, 1e-15), inst.weight_hints());
  SigmaResult sig;
  try {
    sig = find_sigma(inst, g, opts);
  } catch (const NumericalError&) {
    return rep;  // zero source: no flux defect to probe
  }
  const double sigma = sig.sigma;
  for (std::size_t i = 2; i + 2 < nodes.size(); ++i) {
    double hm = nodes[i] - nodes[i - 1];
    double hp = nodes[i + 1] - nodes[i];
    double du = vals[i - 1] * (-hp / (hm * (hm + hp))) + vals[i] * ((hp - hm) / (hm * hp)) +
                vals[i + 1] * (hm / (hp * (hm + hp)));
    double q = inst.d(nodes[i]) * inst.homeo().phi(inst.c(nodes[i]) * du);
    double target = prim(sigma) - prim(nodes[i]);  // integral_t^sigma g
    rep.quasi_derivative_residual = std::max(rep.quasi_derivative_residual, std::fabs(q - target));
    rep.quasi_scale = std::max(rep.quasi_scale, std::fabs(target));
  }
  return rep;
}

}  // namespace philap
