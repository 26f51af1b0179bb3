#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "philap/errors.hpp"

namespace philap {

using Integrand = std::function<double(double)>;

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
  bool converged = false;
};

// Declares that a weight behaves like C*dist^(-exponent) near an endpoint of
// (0,1). The exponent is optional; the endpoint alone already steers panel
// grading.
struct SingularityHint {
  enum class Side { left, right };
  Side side;
  std::optional<double> exponent;
};

struct QuadOptions {
  long max_evaluations = 400000;
  double min_panel_width = 1e-14;  // relative to b-a
};

// Adaptive Gauss-Kronrod (7,15) on (a,b). Panels split dyadically, which
// grades geometrically (ratio 1/2) into hinted endpoints; panels narrower
// than min_panel_width are frozen. converged implies
// error_estimate <= tol*(1+|value|). Budget exhaustion is reported through
// converged=false, not thrown; a non-finite integrand value throws EvalError.
QuadResult integrate(const Integrand& f, double a, double b, double tol,
                     const std::vector<SingularityHint>& hints = {},
                     const QuadOptions& opts = {});

// Cached signed antiderivative s -> integral_anchor^s of h. Each instance
// owns a private refinement cache; new points are reached by integrating the
// short gap from the nearest cached point, so repeated queries stay cheap.
class CumulativeIntegral {
 public:
  CumulativeIntegral(Integrand h, double anchor, double tol,
                     std::vector<SingularityHint> hints = {});

  double operator()(double s) const;
  long evaluations() const { return evals_; }
  double accumulated_error() const { return err_; }

 private:
  Integrand h_;
  double tol_;
  std::vector<SingularityHint> hints_;
  mutable std::map<double, double> known_;
  mutable long evals_ = 0;
  mutable double err_ = 0.0;
};

enum class AnchorSide { left_of_anchor, right_of_anchor };

// integral over (outer_lo,outer_hi) of xi_inverse(integral_s^anchor h) ds
// for the left side, or of xi_inverse(integral_anchor^s h) ds for the right
// side. Inner integrals go through one CumulativeIntegral cache per call.
QuadResult nested_weight_integral(const std::function<double(double)>& xi_inverse,
                                  const Integrand& h, double anchor, AnchorSide side,
                                  double outer_lo, double outer_hi, double tol,
                                  const std::vector<SingularityHint>& hints = {});

enum class Membership { member, nonmember, inconclusive };

// Convergence diagnosis for the nested endpoint integrals that define the
// admissible weight class for a given homeomorphism xi: endpoint cutoffs
// shrink geometrically (eps_k = 2^-k) and the increments between levels are
// classified. Increments that Cauchy-converge give `member`; increments that
// grow or stay bounded away from zero across >= 8 consecutive levels give
// `nonmember`; anything else is `inconclusive`.
Membership classify_membership(const Integrand& h,
                               const std::function<double(double)>& xi_inverse,
                               double tol,
                               const std::vector<SingularityHint>& hints = {});

// Same increment test applied to the plain integral of h over (0,1);
// diagnoses L1 membership.
Membership classify_l1(const Integrand& h, double tol,
                       const std::vector<SingularityHint>& hints = {});

}  // namespace philap
