#pragma once

#include <optional>
#include <span>

#include "philap/grid_function.hpp"
#include "philap/problem.hpp"

namespace philap {

struct SigmaResult {
  double sigma = 0.5;
  std::optional<std::pair<double, double>> zero_interval;  // present for a genuine plateau
  double residual = 0.0;                                   // |nu(sigma)|
};

struct SigmaOptions {
  double tol = 1e-10;            // |nu| <= tol*scale at the returned sigma
  double plateau_width = 1e-6;   // narrower zero sets are bisection noise
  double boundary_clip = 1e-9;   // nu is probed inside [clip, 1-clip]
};

// nu_g(t): difference of the two branch integrals whose common zero is the
// peak abscissa of the solution formula. Nondecreasing in t, negative near 0
// and positive near 1 for g >= 0 not identically zero.
double nu(const ProblemInstance& inst, const Integrand& g, double t);

// Bisection for the zero of nu_g. When nu vanishes on an interval wider than
// plateau_width the whole bracket is reported and its midpoint returned.
// Throws NumericalError when no sign change exists (g == 0 or broken
// quadrature).
SigmaResult find_sigma(const ProblemInstance& inst, const Integrand& g,
                       const SigmaOptions& opts = {});

// The integral solution operator: u(t) climbs from both boundary points to
// the peak at sigma. Output nodes are `mesh` with sigma inserted, so the
// node maximum is the exact sup norm; boundary values are exactly 0. A
// source with vanishing total mass maps to the zero function.
GridFunction apply_T(const ProblemInstance& inst, const Integrand& g,
                     std::span<const double> mesh, const SigmaOptions& opts = {});

// H(lambda,u) = T(lambda*h*f(u)) evaluated on u's node set.
GridFunction apply_H(const ProblemInstance& inst, double lambda, const GridFunction& u,
                     const SigmaOptions& opts = {});

enum class ConeMode { lemma21, coneK };

// lemma21: min over nodes of u(t) - min(t,1-t)*rho1*||u||.
// coneK:   min over core-interval nodes of u(t) - rho_h*||u||.
// Nonnegative margins certify the corresponding lower bound.
double cone_margin(const ProblemInstance& inst, const GridFunction& u, ConeMode mode);

struct ResidualReport {
  double sup_residual = 0.0;               // ||u - H(lambda,u)|| over nodes
  double quasi_derivative_residual = 0.0;  // defect of d*phi(c*u') against the flux integral
  double quasi_scale = 0.0;                // magnitude reference for the flux defect
};

ResidualReport residual(const ProblemInstance& inst, double lambda, const GridFunction& u,
                        const SigmaOptions& opts = {});

}  // namespace philap
