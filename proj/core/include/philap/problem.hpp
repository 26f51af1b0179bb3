#pragma once

#include <mutex>
#include <optional>
#include <string>

#include "philap/homeo.hpp"
#include "philap/quadrature.hpp"

namespace philap {

// Support structure of the weight h on (0,1):
//   alpha     largest x with h == 0 on (0,x)           (0 when none)
//   alpha_bar end of the positive run starting at alpha
//   beta      1 minus the trailing zero run
//   beta_bar  infimum of x with h > 0 on (x,beta)
// gamma1/gamma2/gamma follow by the fixed affine formulas. The ordering
// 0 <= alpha < gamma1 < gamma < gamma2 < beta <= 1 holds for every
// admissible weight.
struct WeightProfile {
  double alpha = 0.0;
  double alpha_bar = 1.0;
  double beta_bar = 0.0;
  double beta = 1.0;
  double gamma1 = 0.25;
  double gamma2 = 0.75;
  double gamma = 0.5;
  bool declared = false;  // from user hints rather than the numerical scan
};

struct SupportHints {
  double alpha;
  double alpha_bar;
  double beta_bar;
  double beta;
};

struct ErrBound {
  double value = 0.0;
  double error = 0.0;
};

struct DerivedConstants {
  double rho1 = 1.0;    // in (0,1]
  double rho_h = 0.0;   // rho1 * min(gamma1, 1-gamma2)
  double gamma0 = 0.0;  // min(gamma1, 1-gamma2)
  ErrBound A1;          // 0 < A1 < A2
  ErrBound A2;
  ErrBound h_star;      // min of the two plain core integrals of h
  ErrBound h_upper;     // max of the two psi1^-1-nested endpoint integrals
};

enum class LimitClass { zero, finite, infinite, inconclusive };

struct FLimit {
  LimitClass cls = LimitClass::inconclusive;
  double value = 0.0;  // meaningful for finite
};

struct FLimits {
  FLimit f0;
  FLimit finf;
};

// Numerical scan of the weight's support structure, or validation of
// declared hints against samples. Throws InvariantError when h vanishes
// identically or hints contradict the samples.
WeightProfile analyze_weight(const Expression& h,
                             const std::optional<SupportHints>& hints = std::nullopt,
                             double zero_threshold = 1e-12);

struct ReducedForms {
  std::string phi_src;  // in x
  std::string c_src;    // in t
  std::string d_src;
  std::string h_src;
};

// Change of variables taking the radial annulus problem
// div(w(|x|)A(|grad v|)grad v) + lambda k(|x|) f(v) = 0, R1 < |x| < R2,
// to the interval form on (0,1). The psi control pair for the induced phi
// must be supplied by the caller.
ReducedForms reduce_annular(const Expression& w, const Expression& A, const Expression& k,
                            double R1, double R2, int N);

// An immutable problem definition: homeomorphism bundle, positive
// coefficients c and d, admissible weight h, positive nonlinearity f.
// Construction validates the sign invariants on verification grids, locates
// the coefficient extrema, analyzes the weight support, and computes every
// derived constant; a weight whose nested endpoint integrals diverge is
// rejected here.
class ProblemInstance {
 public:
  ProblemInstance(HomeoBundle homeo, Expression c, Expression d, Expression h, Expression f,
                  std::vector<SingularityHint> weight_hints = {},
                  std::optional<SupportHints> support = std::nullopt,
                  double quad_tol = 1e-12);

  const HomeoBundle& homeo() const { return homeo_; }
  double c(double t) const { return c_(t); }
  double d(double t) const { return d_(t); }
  double h(double t) const;
  double f(double s) const { return f_(s); }

  const Expression& c_expr() const { return c_; }
  const Expression& d_expr() const { return d_; }
  const Expression& h_expr() const { return h_; }
  const Expression& f_expr() const { return f_; }

  double c0() const { return c0_; }
  double c_max() const { return cmax_; }
  double d0() const { return d0_; }
  double d_max() const { return dmax_; }
  double quad_tol() const { return quad_tol_; }
  const std::vector<SingularityHint>& weight_hints() const { return hints_; }

  const WeightProfile& profile() const { return profile_; }
  const DerivedConstants& constants() const { return consts_; }

  // min of f over [rho_h*m, m] and max of f over [0,m]; the maximum is
  // memoized with a running max so it is nondecreasing in m by construction.
  std::pair<double, double> f_envelopes(double m) const;

  // R1(m) = phi(m/A1)/f_*(m), R2(m) = phi(m/A2)/f^*(m)
  std::pair<double, double> R_curves(double m) const;

  FLimits f_limits() const;

  Membership h_membership_psi1(double tol = 1e-9) const;
  Membership h_membership_l1(double tol = 1e-9) const;

 private:
  HomeoBundle homeo_;
  Expression c_, d_, h_, f_;
  std::vector<SingularityHint> hints_;
  double quad_tol_;
  double c0_, cmax_, d0_, dmax_;
  WeightProfile profile_;
  DerivedConstants consts_;

  mutable std::mutex env_mu_;
  mutable std::map<double, double> fupper_memo_;
  mutable std::optional<FLimits> flimits_memo_;
};

}  // namespace philap
