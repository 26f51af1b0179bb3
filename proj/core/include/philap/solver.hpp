#pragma once

#include <variant>

#include "philap/solution_operator.hpp"

namespace philap {

struct Solution {
  GridFunction u;
  double sigma = 0.5;
  double lambda = 0.0;
  double sup_norm = 0.0;
  double sup_residual = 0.0;
  double cone_margin = 0.0;  // coneK mode
};

enum class NonConvergenceKind { collapsed_to_zero, oscillating, budget };

using PicardOutcome = std::variant<Solution, NonConvergenceKind>;

struct SolverOptions {
  double tol = 1e-7;             // returned solutions satisfy ||u-H(u)|| <= tol*(1+||u||)
  double polish_target = 1e-7;   // absolute fixed-point defect aimed for by polishing
  int mesh_size = 257;
  double mesh_ratio = 0.85;
  double tail_eps = 1e-4;        // integral-form tails on [0,eps] and [1-eps,1]
  int substeps = 8;              // RK4 substeps per mesh interval
  int newton_max = 50;
  double fd_step_rel = 1e-6;
  double cluster_log_norm = 1e-3;  // distinctness of roots in (log||u||, sigma)
  double cluster_sigma = 1e-3;
  SigmaOptions sigma_opts{};
};

// Damped fixed-point iteration u <- (1-damping)u + damping*H(lambda,u).
// Finds norm-stable fixed points only; unstable solutions need the shooting
// path. Convergence to the zero function is reported as collapsed_to_zero.
PicardOutcome picard(const ProblemInstance& inst, double lambda, const GridFunction& u0,
                     double damping, int max_iter, const SolverOptions& opts = {});

// Peak-anchored shooting at fixed lambda: for every seed peak value M the
// state (u,q) is integrated outward from (sigma, M, 0) and Newton drives
// (u(0), u(1)) to zero in the unknowns (sigma, M). Converged roots are
// clustered, polished against the integral operator, verified, and returned
// sorted by sup norm. Per-seed failures are silently skipped.
std::vector<Solution> solve_fixed_lambda(const ProblemInstance& inst, double lambda,
                                         std::span<const double> M_grid,
                                         const SolverOptions& opts = {});

struct BranchSample {
  double M = 0.0;
  double lambda = 0.0;
  double sigma = 0.5;
  double residual = 0.0;  // scaled fixed-point defect of the reconstructed solution
};

struct Branch {
  std::vector<BranchSample> samples;  // strictly increasing in M
  std::vector<std::pair<double, double>> gaps;  // M-intervals where continuation stalled
};

// Branch continuation lambda(M): same outward integration with unknowns
// (sigma, lambda), each sample seeded from its predecessor.
Branch continue_branch(const ProblemInstance& inst, std::span<const double> M_grid,
                       const SolverOptions& opts = {});

struct Certificate {
  double sup_residual = 0.0;
  double quasi_derivative_residual = 0.0;
  double quasi_scale = 0.0;
  double cone_margin_lemma21 = 0.0;
  double cone_margin_coneK = 0.0;
  double boundary0 = 0.0;
  double boundary1 = 0.0;
  bool pass = false;
};

struct CertifyTolerances {
  double sup_rel = 1e-6;        // against 1+||u||
  double quasi_rel = 1e-3;      // against 1+quasi_scale
  double cone_rel = 1e-8;       // margins may undershoot by this * ||u||
  double boundary_abs = 1e-12;
};

Certificate verify_solution(const ProblemInstance& inst, double lambda, const GridFunction& u,
                            const CertifyTolerances& tols = {},
                            const SigmaOptions& sigma_opts = {});

// log-spaced grid, `per_decade` points per decade, both endpoints included
std::vector<double> log_grid(double lo, double hi, int per_decade);

}  // namespace philap
