#pragma once

#include "philap/solver.hpp"

namespace philap {

// A lambda-interval with a predicted number of positive solutions and the
// norm shells separating them, together with the norm witnesses that
// produced it.
struct Window {
  double lambda_low = 0.0;
  double lambda_high = 0.0;
  int predicted_count = 1;
  std::vector<std::pair<double, double>> shells;  // ordered, pairwise disjoint
  std::vector<double> witnesses;                  // the norm levels backing the window
  std::string provenance;
};

// Existence window from a single witness pair: nonempty iff R1(m1) < R2(m2);
// the solution shell lies between the two norms.
std::optional<Window> existence_window(const ProblemInstance& inst, double m1, double m2);

// Scan-based search for two- and three-solution windows. For each admissible
// ordering pattern of the witnesses the window length is maximized greedily
// over the grid; all maximal nonempty windows are returned, widest first.
std::vector<Window> multiplicity_windows(const ProblemInstance& inst,
                                         std::span<const double> scan);

// Regime classification by the limits of f/phi at 0 and infinity.
//   1: one limit 0, the other infinite       -> solution for every lambda
//   2: f0=0,  finf finite (or mirrored)      -> solutions for lambda > lambda_*
//   3: f0=inf, finf finite (or mirrored)     -> solutions for lambda < lambda^*
//   4: both limits 0                         -> two solutions for large lambda
//   5: both limits infinite                  -> two solutions for small lambda
//   6: both limits finite-or-zero            -> no solutions below lambda_bar
//   7: both limits positive-or-infinite      -> no solutions above lambda_under
// Cases 6 and 7 may hold alongside 1-5 and are reported as flags.
struct CaseReport {
  int case_id = 0;  // 0 = inconclusive classification
  bool nonexistence_below = false;  // case 6 applies
  bool nonexistence_above = false;  // case 7 applies
  FLimits limits;
  std::string predicted;
  std::optional<double> lambda_star;        // min of R1 over the scan (cases 2,4)
  std::optional<double> m_star;             // achieving norm; +inf when it escapes the scan
  std::optional<double> lambda_upper_star;  // max of R2 over the scan (cases 3,5)
  std::optional<double> m_upper_star;
  std::optional<double> lambda_bar;        // nonexistence threshold from case 6
  std::optional<double> lambda_underline;  // nonexistence threshold from case 7
  std::string method;
};

CaseReport classify_case(const ProblemInstance& inst, std::span<const double> scan);

// lambda_bar = (d0/C1) psi1(c0/h^*) when sup f/phi is finite;
// lambda_under = (dmax/(h_* eps)) psi2(cmax/gamma0) when inf f/phi > 0.
// C1 and eps are sampled on a 2001-point log grid over [1e-8,1e8] with
// golden refinement at the extremal sample, so the bounds carry a "sampled"
// method tag rather than a proof.
std::pair<std::optional<double>, std::optional<double>> nonexistence_bounds(
    const ProblemInstance& inst);

enum class ShellVerdict { expanding, contracting, inconclusive };

// Sampled necessary check of the norm comparison on the shell of radius m:
// ||H(lambda,v)|| > m for every profile reports expanding, < m for every
// profile reports contracting. Not an index computation.
ShellVerdict shell_index_check(const ProblemInstance& inst, double lambda, double m,
                               std::span<const GridFunction> profiles,
                               const SigmaOptions& sigma_opts = {});

// Built-in cone profile family on the shell of radius m (tents at the core
// markers, parabola, plateau, sine arch), projected into the cone.
std::vector<GridFunction> default_shell_profiles(const ProblemInstance& inst, double m,
                                                 int mesh_size = 257);

enum class BranchTrend { decreasing, increasing, flat, nonmonotone };

struct TrendThresholds {
  double flat_rel = 1e-6;  // relative lambda variation treated as flat
};

BranchTrend branch_trend(const Branch& br, const TrendThresholds& thr = {});

}  // namespace philap
