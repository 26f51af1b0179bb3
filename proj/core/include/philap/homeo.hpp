#pragma once

#include <utility>
#include <vector>

#include "philap/expr.hpp"

namespace philap {

struct CheckReport {
  bool pass = false;
  double worst_margin = 0.0;  // most negative normalized slack seen
  double worst_x = 0.0;
  double worst_y = 0.0;
  std::size_t points_checked = 0;
};

// An odd increasing homeomorphism phi together with its increasing control
// pair (psi1, psi2) on the nonnegative half-line. phi is supplied on x >= 0
// and extended oddly; inverses are computed numerically by bracketing plus a
// safeguarded secant. Construction spot-checks phi(0)=0, psi_i(0)=0 and
// strict monotonicity on a 1024-point grid and aborts on failure, since all
// downstream root-finding assumes a monotone phi.
class HomeoBundle {
 public:
  HomeoBundle(Expression phi, Expression psi1, Expression psi2,
              double inverse_tolerance = 1e-12, double bracket_growth = 2.0);

  double phi(double x) const;  // odd extension for x < 0
  double psi1(double y) const;
  double psi2(double y) const;

  enum class Which { phi, psi1, psi2 };

  // Monotone inverse: returns x with |eval(which,x) - y| <= tol*(1+|y|).
  // phi inverses accept any real y (reflection); psi inverses need y >= 0.
  // Throws NumericalError if no bracket is found after bounded expansion.
  double invert(Which which, double y) const;

  double phi_inverse(double y) const { return invert(Which::phi, y); }
  double psi1_inverse(double y) const { return invert(Which::psi1, y); }
  double psi2_inverse(double y) const { return invert(Which::psi2, y); }

  // Inversion driven to small relative error in x as well; used where the
  // result is compared multiplicatively (the inverse sandwich sweep).
  double invert_tight(Which which, double y) const;

  // Sampled verification of phi(x)psi1(y) <= phi(xy) <= phi(x)psi2(y).
  // Margins are normalized by the local magnitude; pass iff worst >= -tol.
  CheckReport check_condition_A(const std::vector<std::pair<double, double>>& lattice,
                                double tol = 1e-9) const;
  CheckReport check_condition_A(double tol = 1e-9) const;

  // Same sweep for phi^-1(x)psi2^-1(y) <= phi^-1(xy) <= phi^-1(x)psi1^-1(y).
  CheckReport check_inverse_sandwich(const std::vector<std::pair<double, double>>& lattice,
                                     double tol = 1e-9) const;
  CheckReport check_inverse_sandwich(double tol = 1e-9) const;

  // 64x64 log-spaced grid on [1e-6,1e6]^2 plus boundary-adjacent decades.
  static std::vector<std::pair<double, double>> default_lattice();

  double inverse_tolerance() const { return inverse_tolerance_; }

 private:
  double eval_raw(Which which, double x) const;
  double invert_impl(Which which, double y, double x_rtol) const;

  Expression phi_, psi1_, psi2_;
  double inverse_tolerance_;
  double bracket_growth_;
};

}  // namespace philap
