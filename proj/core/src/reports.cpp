#include "philap/reports.hpp"

#include <cstdio>
#include <sstream>

namespace philap {

namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* membership_name(Membership m) {
  switch (m) {
    case Membership::member:
      return "member";
    case Membership::nonmember:
      return "nonmember";
    default:
      return "inconclusive";
  }
}

const char* limit_name(const FLimit& l) {
  switch (l.cls) {
    case LimitClass::zero:
      return "zero";
    case LimitClass::finite:
      return "finite";
    case LimitClass::infinite:
      return "infinite";
    default:
      return "inconclusive";
  }
}

const char* verdict_name(ShellVerdict v) {
  switch (v) {
    case ShellVerdict::expanding:
      return "expanding";
    case ShellVerdict::contracting:
      return "contracting";
    default:
      return "inconclusive";
  }
}

}  // namespace

std::string render_constants_report(const ProblemInstance& inst, const Config& cfg) {
  std::ostringstream os;
  const WeightProfile& p = inst.profile();
  const DerivedConstants& k = inst.constants();

  os << "== problem constants ==\n";
  os << "coefficient extrema: c0=" << g17(inst.c0()) << " cmax=" << g17(inst.c_max())
     << " d0=" << g17(inst.d0()) << " dmax=" << g17(inst.d_max())
     << "  (1025-point grid, golden refinement)\n";
  os << "weight support: alpha=" << g17(p.alpha) << " alpha_bar=" << g17(p.alpha_bar)
     << " beta_bar=" << g17(p.beta_bar) << " beta=" << g17(p.beta)
     << (p.declared ? "  (declared)" : "  (scanned, boundaries refined to 1e-9)") << "\n";
  os << "core markers: gamma1=" << g17(p.gamma1) << " gamma2=" << g17(p.gamma2)
     << " gamma=" << g17(p.gamma) << "  (exact affine formulas)\n";
  os << "rho1=" << g17(k.rho1) << "  rho_h=" << g17(k.rho_h) << "  gamma0=" << g17(k.gamma0)
     << "  (from coefficient extrema and psi inverses, inverse tol "
     << g17(inst.homeo().inverse_tolerance()) << ")\n";
  os << "A1=" << g17(k.A1.value) << "  (quadrature error <= " << g17(k.A1.error) << ")\n";
  os << "A2=" << g17(k.A2.value) << "  (quadrature error <= " << g17(k.A2.error) << ")\n";
  os << "h_star=" << g17(k.h_star.value) << "  (quadrature error <= " << g17(k.h_star.error)
     << ")\n";
  os << "h_upper=" << g17(k.h_upper.value) << "  (quadrature error <= " << g17(k.h_upper.error)
     << ")\n";

  FLimits lims = inst.f_limits();
  os << "f/phi limit at 0: " << limit_name(lims.f0);
  if (lims.f0.cls == LimitClass::finite) os << " value=" << g17(lims.f0.value) << " (extrapolated)";
  os << "  (log-grid trend rule)\n";
  os << "f/phi limit at infinity: " << limit_name(lims.finf);
  if (lims.finf.cls == LimitClass::finite)
    os << " value=" << g17(lims.finf.value) << " (extrapolated)";
  os << "  (log-grid trend rule)\n";

  double mtol = cfg.numerics.membership_tol;
  os << "weight class (nested, psi1): " << membership_name(inst.h_membership_psi1(mtol))
     << "  (geometric cutoff increments, tol " << g17(mtol) << ")\n";
  os << "weight class (plain L1): " << membership_name(inst.h_membership_l1(mtol))
     << "  (same increment rule)\n";

  os << "\n== R curves over the m-grid ==\n";
  os << "m,R1,R2\n";
  for (double m : make_m_grid(cfg)) {
    auto [r1, r2] = inst.R_curves(m);
    os << g17(m) << "," << g17(r1) << "," << g17(r2) << "\n";
  }
  return os.str();
}

std::string render_certify_report(const ProblemInstance& inst, const Config& cfg) {
  std::ostringstream os;
  std::vector<double> scan = make_m_grid(cfg);
  CaseReport rep = classify_case(inst, scan);

  os << "== regime classification ==\n";
  os << "case " << rep.case_id << ": " << rep.predicted << "\n";
  os << "f/phi limits: at0=" << limit_name(rep.limits.f0)
     << " atinf=" << limit_name(rep.limits.finf) << "\n";
  if (rep.lambda_star)
    os << "lambda_star=" << g17(*rep.lambda_star) << " at m=" << g17(*rep.m_star)
       << "  (scan minimum of R1)\n";
  if (rep.lambda_upper_star)
    os << "lambda_upper_star=" << g17(*rep.lambda_upper_star) << " at m=" << g17(*rep.m_upper_star)
       << "  (scan maximum of R2)\n";
  if (rep.nonexistence_below)
    os << "no positive solutions below lambda_bar="
       << (rep.lambda_bar ? g17(*rep.lambda_bar) : "unavailable") << "  (sampled C1)\n";
  if (rep.nonexistence_above)
    os << "no positive solutions above lambda_underline="
       << (rep.lambda_underline ? g17(*rep.lambda_underline) : "unavailable")
       << "  (sampled eps)\n";
  os << "method: " << rep.method << "\n";

  os << "\n== multiplicity windows ==\n";
  std::vector<Window> windows = multiplicity_windows(inst, scan);
  if (windows.empty()) os << "no multi-solution windows found on the scan\n";
  for (const Window& w : windows) {
    os << "window [" << g17(w.lambda_low) << ", " << g17(w.lambda_high) << "] predicted "
       << w.predicted_count << " solutions  (" << w.provenance << ")\n";
    os << "  witnesses:";
    for (double m : w.witnesses) os << " " << g17(m);
    os << "\n  shells:";
    for (auto& [lo, hi] : w.shells) os << " (" << g17(lo) << "," << g17(hi) << ")";
    os << "\n";
    double mid = 0.5 * (w.lambda_low + w.lambda_high);
    os << "  shell checks at lambda=" << g17(mid) << ":\n";
    for (std::size_t i = 0; i < w.witnesses.size(); ++i) {
      double m = w.witnesses[i];
      auto profiles = default_shell_profiles(inst, m, cfg.numerics.mesh_size);
      ShellVerdict v = shell_index_check(inst, mid, m, profiles);
      os << "    m=" << g17(m) << ": " << verdict_name(v) << "\n";
    }
  }
  return os.str();
}

std::string render_branch_csv(const Branch& br) {
  std::ostringstream os;
  os << "M,lambda,sigma,residual\n";
  for (const BranchSample& s : br.samples)
    os << g17(s.M) << "," << g17(s.lambda) << "," << g17(s.sigma) << "," << g17(s.residual)
       << "\n";
  return os.str();
}

std::string render_solutions_index_csv(const std::vector<Solution>& sols) {
  std::ostringstream os;
  os << "index,lambda,sup_norm,sigma,sup_residual,cone_margin\n";
  for (std::size_t i = 0; i < sols.size(); ++i) {
    const Solution& s = sols[i];
    os << i + 1 << "," << g17(s.lambda) << "," << g17(s.sup_norm) << "," << g17(s.sigma) << ","
       << g17(s.sup_residual) << "," << g17(s.cone_margin) << "\n";
  }
  return os.str();
}

}  // namespace philap
