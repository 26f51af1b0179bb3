#include "philap/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace philap {

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  if (!(0.0 < lo && lo < hi)) throw InvariantError("log grid needs 0 < lo < hi");
  if (per_decade < 1) throw InvariantError("log grid needs >= 1 point per decade");
  double llo = std::log10(lo), lhi = std::log10(hi);
  int n = std::max(2, static_cast<int>(std::ceil((lhi - llo) * per_decade)) + 1);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = std::pow(10.0, llo + (lhi - llo) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

namespace {

struct ShotResult {
  double r0 = 0.0;  // u(0)
  double r1 = 0.0;  // u(1)
  // trajectory at requested nodes (only filled when recording)
  std::vector<double> nodes;
  std::vector<double> values;
};

struct Shooter {
  const ProblemInstance& inst;
  double lambda;
  const SolverOptions& opts;
  std::vector<double> base_mesh;

  Shooter(const ProblemInstance& i, double lam, const SolverOptions& o)
      : inst(i), lambda(lam), opts(o),
        base_mesh(GridFunction::graded_mesh(o.mesh_size, o.mesh_ratio)) {}

  double fpos(double u) const { return inst.f(std::max(u, 0.0)); }

  // d/dt of (u,q): u' = (1/c) phi^-1(q/d), q' = -lambda h f(u)
  void deriv(double t, double u, double q, double& du, double& dq) const {
    du = (1.0 / inst.c(t)) * inst.homeo().phi_inverse(q / inst.d(t));
    dq = -lambda * inst.h(t) * fpos(u);
  }

  // one RK4 step from t to t+dt (dt may be negative)
  void rk4(double& t, double& u, double& q, double dt) const {
    double k1u, k1q, k2u, k2q, k3u, k3q, k4u, k4q;
    deriv(t, u, q, k1u, k1q);
    deriv(t + 0.5 * dt, u + 0.5 * dt * k1u, q + 0.5 * dt * k1q, k2u, k2q);
    deriv(t + 0.5 * dt, u + 0.5 * dt * k2u, q + 0.5 * dt * k2q, k3u, k3q);
    deriv(t + dt, u + dt * k3u, q + dt * k3q, k4u, k4q);
    u += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    q += dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    t += dt;
  }

  // integration checkpoints between the peak and the tail boundary,
  // geometrically refined toward the peak where phi^-1 can lose smoothness
  std::vector<double> checkpoints(double from_sigma, double to_edge) const {
    std::vector<double> pts{to_edge, from_sigma};
    double lo = std::min(from_sigma, to_edge), hi = std::max(from_sigma, to_edge);
    for (double n : base_mesh)
      if (n > lo && n < hi) pts.push_back(n);
    double span = hi - lo;
    for (int j = 1; j <= 22; ++j) {
      double w = span * std::ldexp(1.0, -j);
      pts.push_back(from_sigma < to_edge ? from_sigma + w : from_sigma - w);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (from_sigma > to_edge) std::reverse(pts.begin(), pts.end());
    return pts;
  }

  // frozen-tail drop over [0,eps]: u decreases by the integral of
  // (1/c) phi^-1((q_eps + lambda f(u_eps) int_s^eps h)/d)
  double tail_drop_left(double eps, double u_eps, double q_eps,
                        std::vector<double>* nodes = nullptr,
                        std::vector<double>* vals = nullptr) const {
    CumulativeIntegral hh([this](double t) { return inst.h(t); }, eps,
                          std::max(inst.quad_tol() * 0.1, 1e-15), inst.weight_hints());
    double fe = lambda * fpos(u_eps);
    Integrand integ = [&](double s) {
      double q = q_eps + fe * std::max(-hh(s), 0.0);
      return (1.0 / inst.c(s)) * inst.homeo().phi_inverse(q / inst.d(s));
    };
    if (nodes) {
      // cumulative values at the tail nodes, climbing from 0
      double acc = 0.0, prev = 0.0;
      double u0 = u_eps - integrate(integ, 0.0, eps, inst.quad_tol(), inst.weight_hints()).value;
      for (double n : *nodes) {
        acc += integrate(integ, prev, n, inst.quad_tol(), inst.weight_hints()).value;
        vals->push_back(u0 + acc);
        prev = n;
      }
      return u_eps - u0;
    }
    return integrate(integ, 0.0, eps, inst.quad_tol(), inst.weight_hints()).value;
  }

  double tail_drop_right(double eps, double u_eps, double q_eps,
                         std::vector<double>* nodes = nullptr,
                         std::vector<double>* vals = nullptr) const {
    CumulativeIntegral hh([this](double t) { return inst.h(t); }, 1.0 - eps,
                          std::max(inst.quad_tol() * 0.1, 1e-15), inst.weight_hints());
    double fe = lambda * fpos(u_eps);
    Integrand integ = [&](double s) {
      // q(s) = q(1-eps) - fe * int_{1-eps}^s h  (negative side)
      double q = q_eps - fe * std::max(hh(s), 0.0);
      return (1.0 / inst.c(s)) * (-inst.homeo().phi_inverse(q / inst.d(s)));
    };
    if (nodes) {
      double acc = 0.0, prev = 1.0;
      double u1 = u_eps - integrate(integ, 1.0 - eps, 1.0, inst.quad_tol(), inst.weight_hints()).value;
      for (auto it = nodes->rbegin(); it != nodes->rend(); ++it) {
        acc += integrate(integ, *it, prev, inst.quad_tol(), inst.weight_hints()).value;
        vals->push_back(u1 + acc);
        prev = *it;
      }
      std::reverse(vals->begin(), vals->end());
      return u_eps - u1;
    }
    return integrate(integ, 1.0 - eps, 1.0, inst.quad_tol(), inst.weight_hints()).value;
  }

  ShotResult shoot(double sigma, double M, bool record = false) const {
    const double eps = opts.tail_eps;
    ShotResult out;
    if (!(sigma > 2.0 * eps && sigma < 1.0 - 2.0 * eps) || !(M > 0.0) || !std::isfinite(M)) {
      out.r0 = out.r1 = 1e6 * (1.0 + std::fabs(M));  // steer Newton back inside
      return out;
    }
    std::vector<std::pair<double, double>> traj;  // (t,u) at base nodes

    // left sweep sigma -> eps
    double t = sigma, u = M, q = 0.0;
    std::vector<double> pts = checkpoints(sigma, eps);
    if (record) traj.emplace_back(sigma, M);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      double dt = (pts[i] - pts[i - 1]) / opts.substeps;
      for (int s = 0; s < opts.substeps; ++s) rk4(t, u, q, dt);
      t = pts[i];
      if (record) traj.emplace_back(t, u);
    }
    double u_eps_l = u, q_eps_l = q;
    out.r0 = u_eps_l - tail_drop_left(eps, u_eps_l, q_eps_l);

    // right sweep sigma -> 1-eps
    t = sigma;
    u = M;
    q = 0.0;
    pts = checkpoints(sigma, 1.0 - eps);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      double dt = (pts[i] - pts[i - 1]) / opts.substeps;
      for (int s = 0; s < opts.substeps; ++s) rk4(t, u, q, dt);
      t = pts[i];
      if (record) traj.emplace_back(t, u);
    }
    double u_eps_r = u, q_eps_r = q;
    out.r1 = u_eps_r - tail_drop_right(eps, u_eps_r, q_eps_r);

    if (!std::isfinite(out.r0) || !std::isfinite(out.r1)) {
      out.r0 = out.r1 = 1e6 * (1.0 + std::fabs(M));
      return out;
    }

    if (record) {
      // assemble full node set: 0, tail nodes, interior trajectory, 1
      std::vector<double> tail_l, tail_r, vals_l, vals_r;
      for (double n : base_mesh)
        if (n > 0.0 && n < eps) tail_l.push_back(n);
      for (double n : base_mesh)
        if (n > 1.0 - eps && n < 1.0) tail_r.push_back(n);
      tail_drop_left(eps, u_eps_l, q_eps_l, &tail_l, &vals_l);
      tail_drop_right(eps, u_eps_r, q_eps_r, &tail_r, &vals_r);

      std::sort(traj.begin(), traj.end());
      out.nodes.push_back(0.0);
      out.values.push_back(0.0);
      for (std::size_t i = 0; i < tail_l.size(); ++i) {
        out.nodes.push_back(tail_l[i]);
        out.values.push_back(std::max(vals_l[i], 0.0));
      }
      for (auto& [tn, un] : traj) {
        if (tn <= out.nodes.back() + 1e-13) continue;
        out.nodes.push_back(tn);
        out.values.push_back(std::max(un, 0.0));
      }
      for (std::size_t i = 0; i < tail_r.size(); ++i) {
        if (tail_r[i] <= out.nodes.back() + 1e-13) continue;
        out.nodes.push_back(tail_r[i]);
        out.values.push_back(std::max(vals_r[i], 0.0));
      }
      out.nodes.push_back(1.0);
      out.values.push_back(0.0);
    }
    return out;
  }
};

// damped 2-variable Newton with finite-difference Jacobian; fn maps (a,b) to
// scaled residuals. Returns true when the residual norm drops below tol.
template <typename Fn>
bool newton2(Fn&& fn, double& a, double& b, double tol, int max_iter, double fd_rel,
             double a_lo, double a_hi) {
  auto norm = [](std::pair<double, double> r) {
    return std::max(std::fabs(r.first), std::fabs(r.second));
  };
  std::pair<double, double> r = fn(a, b);
  double rn = norm(r);
  for (int it = 0; it < max_iter; ++it) {
    if (rn <= tol) return true;
    double da = fd_rel * std::max(std::fabs(a), 1e-3);
    double db = fd_rel * std::max(std::fabs(b), 1e-3);
    auto ra = fn(a + da, b);
    auto rb = fn(a, b + db);
    double j11 = (ra.first - r.first) / da, j12 = (rb.first - r.first) / db;
    double j21 = (ra.second - r.second) / da, j22 = (rb.second - r.second) / db;
    double det = j11 * j22 - j12 * j21;
    if (!std::isfinite(det) || std::fabs(det) < 1e-300) return false;
    double sa = (-r.first * j22 + r.second * j12) / det;
    double sb = (-j11 * r.second + j21 * r.first) / det;
    bool improved = false;
    for (int halve = 0; halve < 25; ++halve) {
      double na = std::clamp(a + sa, a_lo, a_hi);
      double nb = b + sb;
      auto rnew = fn(na, nb);
      if (norm(rnew) < rn) {
        a = na;
        b = nb;
        r = rnew;
        rn = norm(rnew);
        improved = true;
        break;
      }
      sa *= 0.5;
      sb *= 0.5;
    }
    if (!improved) return rn <= 1e2 * tol;
  }
  return rn <= tol;
}

GridFunction blend(const GridFunction& u, const GridFunction& hu, double damping) {
  // combine on hu's node set (a superset of u's up to the new sigma node)
  std::vector<double> vals(hu.size());
  for (std::size_t i = 0; i < hu.size(); ++i) {
    double t = hu.nodes()[i];
    vals[i] = (1.0 - damping) * u(t) + damping * hu.values()[i];
  }
  return GridFunction(hu.nodes(), std::move(vals));
}

double sup_diff(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a.values()[i] - b(a.nodes()[i])));
  return m;
}

// Anderson-accelerated fixed-point polish toward u = H(lambda,u) on a fixed
// node set; falls back to a dense finite-difference Newton when the
// accelerated iteration stalls. Returns the achieved defect.
double polish_fixed_point(const ProblemInstance& inst, double lambda, GridFunction& u,
                          double target_abs, const SolverOptions& opts) {
  const std::vector<double>& nodes = u.nodes();
  const std::size_t n = nodes.size();
  auto G = [&](const Eigen::VectorXd& x) {
    std::vector<double> vals(x.data(), x.data() + n);
    vals.front() = 0.0;
    vals.back() = 0.0;
    GridFunction ug(nodes, vals);
    GridFunction hu = apply_H(inst, lambda, ug, opts.sigma_opts);
    Eigen::VectorXd g(n);
    for (std::size_t i = 0; i < n; ++i) g[static_cast<Eigen::Index>(i)] = hu(nodes[i]);
    return g;
  };

  Eigen::VectorXd x(n);
  for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = u.values()[i];

  const int m_depth = 4;
  std::vector<Eigen::VectorXd> dF, dG;
  Eigen::VectorXd gx = G(x), fx = gx - x;
  double best = fx.lpNorm<Eigen::Infinity>();
  Eigen::VectorXd best_x = x;
  double initial = best;

  for (int it = 0; it < 60 && best > target_abs; ++it) {
    Eigen::VectorXd xn;
    if (dF.empty()) {
      xn = gx;
    } else {
      int m = static_cast<int>(dF.size());
      Eigen::MatrixXd Fm(n, m), Gm(n, m);
      for (int j = 0; j < m; ++j) {
        Fm.col(j) = dF[j];
        Gm.col(j) = dG[j];
      }
      Eigen::VectorXd gamma =
          (Fm.transpose() * Fm + 1e-14 * Eigen::MatrixXd::Identity(m, m))
              .ldlt()
              .solve(Fm.transpose() * fx);
      xn = gx - Gm * gamma;
    }
    xn[0] = 0.0;
    xn[static_cast<Eigen::Index>(n - 1)] = 0.0;
    for (Eigen::Index i = 0; i < xn.size(); ++i) xn[i] = std::max(xn[i], 0.0);
    Eigen::VectorXd gxn = G(xn), fxn = gxn - xn;
    if (static_cast<int>(dF.size()) == m_depth) {
      dF.erase(dF.begin());
      dG.erase(dG.begin());
    }
    dF.push_back(fxn - fx);
    dG.push_back(gxn - gx);
    x = xn;
    gx = gxn;
    fx = fxn;
    double cur = fx.lpNorm<Eigen::Infinity>();
    if (cur < best) {
      best = cur;
      best_x = x;
    }
    if (!std::isfinite(cur) || cur > 1e4 * (initial + 1.0)) break;
  }

  if (best > target_abs) {
    // dense Newton on F(x) = G(x) - x, interior unknowns only
    x = best_x;
    gx = G(x);
    fx = gx - x;
    double fn = fx.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < 4 && fn > target_abs; ++it) {
      const std::size_t ni = n - 2;
      Eigen::MatrixXd J(ni, ni);
      double scale = std::max(1.0, x.lpNorm<Eigen::Infinity>());
      for (std::size_t j = 0; j < ni; ++j) {
        Eigen::VectorXd xp = x;
        double dj = 1e-7 * scale;
        xp[static_cast<Eigen::Index>(j + 1)] += dj;
        Eigen::VectorXd gp = G(xp);
        for (std::size_t i = 0; i < ni; ++i) {
          double fp = gp[static_cast<Eigen::Index>(i + 1)] - xp[static_cast<Eigen::Index>(i + 1)];
          J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              (fp - fx[static_cast<Eigen::Index>(i + 1)]) / dj;
        }
      }
      Eigen::VectorXd fi(ni);
      for (std::size_t i = 0; i < ni; ++i) fi[static_cast<Eigen::Index>(i)] = fx[static_cast<Eigen::Index>(i + 1)];
      Eigen::VectorXd step = J.partialPivLu().solve(-fi);
      bool ok = false;
      for (int halve = 0; halve < 12; ++halve) {
        Eigen::VectorXd xn = x;
        for (std::size_t i = 0; i < ni; ++i)
          xn[static_cast<Eigen::Index>(i + 1)] =
              std::max(x[static_cast<Eigen::Index>(i + 1)] + step[static_cast<Eigen::Index>(i)], 0.0);
        Eigen::VectorXd gn = G(xn), fnv = gn - xn;
        double nn = fnv.lpNorm<Eigen::Infinity>();
        if (nn < fn) {
          x = xn;
          gx = gn;
          fx = fnv;
          fn = nn;
          ok = true;
          break;
        }
        step *= 0.5;
      }
      if (!ok) break;
    }
    if (fn < best) {
      best = fn;
      best_x = x;
    }
  }

  std::vector<double> vals(best_x.data(), best_x.data() + n);
  vals.front() = 0.0;
  vals.back() = 0.0;
  u = GridFunction(nodes, std::move(vals));
  return best;
}

}  // namespace

PicardOutcome picard(const ProblemInstance& inst, double lambda, const GridFunction& u0,
                     double damping, int max_iter, const SolverOptions& opts) {
  if (!(damping > 0.0 && damping <= 1.0)) throw InvariantError("damping must lie in (0,1]");
  GridFunction u = u0;
  const double norm0 = std::max(u0.sup_norm(), 1.0);
  std::vector<double> changes;
  for (int it = 0; it < max_iter; ++it) {
    GridFunction hu = apply_H(inst, lambda, u, opts.sigma_opts);
    GridFunction un = blend(u, hu, damping);
    double change = sup_diff(un, u);
    double norm = un.sup_norm();
    changes.push_back(change);
    u = std::move(un);
    if (norm < 1e-12 * norm0) return NonConvergenceKind::collapsed_to_zero;
    if (change <= 0.1 * opts.tol * (1.0 + norm)) {
      if (norm < 1e-10 * norm0) return NonConvergenceKind::collapsed_to_zero;
      Solution sol;
      sol.u = u;
      sol.lambda = lambda;
      sol.sup_norm = norm;
      Integrand g = [&](double t) { return lambda * inst.h(t) * inst.f(std::max(u(t), 0.0)); };
      sol.sigma = find_sigma(inst, g, opts.sigma_opts).sigma;
      sol.sup_residual = residual(inst, lambda, u, opts.sigma_opts).sup_residual;
      sol.cone_margin = cone_margin(inst, u, ConeMode::coneK);
      return sol;
    }
    // stagnating but not shrinking toward a fixed point
    if (it > 30 && changes[it] > 0.8 * changes[it - 10] && changes[it] > opts.tol * norm)
      return NonConvergenceKind::oscillating;
  }
  return NonConvergenceKind::budget;
}

std::vector<Solution> solve_fixed_lambda(const ProblemInstance& inst, double lambda,
                                         std::span<const double> M_grid,
                                         const SolverOptions& opts) {
  std::vector<Solution> out;
  if (lambda == 0.0) return out;
  if (lambda < 0.0) throw InvariantError("lambda must be nonnegative");
  Shooter shooter(inst, lambda, opts);
  const double eps = opts.tail_eps;
  const double sigma_lo = 2.0 * eps, sigma_hi = 1.0 - 2.0 * eps;

  struct Root {
    double sigma, M;
  };
  std::vector<Root> roots;
  double sigma_seed = inst.profile().gamma;
  for (double M_seed : M_grid) {
    double sg = sigma_seed;
    double lm = std::log(M_seed);
    auto fn = [&](double s, double logm) {
      double M = std::exp(std::clamp(logm, std::log(1e-10), std::log(1e12)));
      ShotResult r = shooter.shoot(s, M);
      double scale = 1.0 + M;
      return std::pair{r.r0 / scale, r.r1 / scale};
    };
    bool ok = newton2(fn, sg, lm, 1e-11, opts.newton_max, opts.fd_step_rel, sigma_lo, sigma_hi);
    if (!ok) continue;
    double M = std::exp(lm);
    if (!(M > 1e-10 && M < 1e12)) continue;
    roots.push_back({sg, M});
    sigma_seed = sg;
  }

  // cluster converged roots; two roots are the same solution when both the
  // log-norm and the sigma gaps are below tolerance
  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return a.M < b.M; });
  std::vector<Root> reps;
  for (const Root& r : roots) {
    bool dup = false;
    for (const Root& q : reps)
      if (std::fabs(std::log(r.M) - std::log(q.M)) <= opts.cluster_log_norm &&
          std::fabs(r.sigma - q.sigma) <= opts.cluster_sigma)
        dup = true;
    if (!dup) reps.push_back(r);
  }

  for (const Root& r : reps) {
    try {
      ShotResult shot = shooter.shoot(r.sigma, r.M, /*record=*/true);
      GridFunction u(shot.nodes, shot.values);
      double target = std::min(opts.polish_target, 0.1 * opts.tol * (1.0 + r.M));
      double defect = polish_fixed_point(inst, lambda, u, target, opts);
      double norm = u.sup_norm();
      if (!(norm > 0.0) || defect > opts.tol * (1.0 + norm)) continue;
      Solution sol;
      sol.u = u;
      sol.lambda = lambda;
      sol.sup_norm = norm;
      Integrand g = [&](double t) { return lambda * inst.h(t) * inst.f(std::max(u(t), 0.0)); };
      sol.sigma = find_sigma(inst, g, opts.sigma_opts).sigma;
      sol.sup_residual = defect;
      sol.cone_margin = cone_margin(inst, u, ConeMode::coneK);
      out.push_back(std::move(sol));
    } catch (const Error&) {
      // per-seed failure: skip
    }
  }

  std::sort(out.begin(), out.end(),
            [](const Solution& a, const Solution& b) { return a.sup_norm < b.sup_norm; });
  // de-duplicate after polishing
  std::vector<Solution> distinct;
  for (Solution& s : out) {
    bool dup = false;
    for (const Solution& q : distinct)
      if (std::fabs(std::log(s.sup_norm) - std::log(q.sup_norm)) <= opts.cluster_log_norm &&
          std::fabs(s.sigma - q.sigma) <= opts.cluster_sigma)
        dup = true;
    if (!dup) distinct.push_back(std::move(s));
  }
  return distinct;
}

Branch continue_branch(const ProblemInstance& inst, std::span<const double> M_grid,
                       const SolverOptions& opts) {
  Branch br;
  const double eps = opts.tail_eps;
  const double sigma_lo = 2.0 * eps, sigma_hi = 1.0 - 2.0 * eps;

  double prev_sigma = inst.profile().gamma;
  std::optional<double> prev_lambda;
  double last_good_M = 0.0;

  for (double M : M_grid) {
    double lam_seed;
    if (prev_lambda) {
      lam_seed = *prev_lambda;
    } else {
      try {
        auto [r1, r2] = inst.R_curves(M);
        lam_seed = std::sqrt(r1 * r2);
      } catch (const Error&) {
        lam_seed = 1.0;
      }
    }
    double sg = prev_sigma;
    double ll = std::log(lam_seed);
    auto fn = [&](double s, double logl) {
      double lam = std::exp(std::clamp(logl, std::log(1e-12), std::log(1e14)));
      Shooter sh(inst, lam, opts);
      ShotResult r = sh.shoot(s, M);
      double scale = 1.0 + M;
      return std::pair{r.r0 / scale, r.r1 / scale};
    };
    bool ok = newton2(fn, sg, ll, 1e-11, opts.newton_max, opts.fd_step_rel, sigma_lo, sigma_hi);
    if (!ok && prev_lambda) {
      // reseed from the R-curve midpoint before declaring a gap
      try {
        auto [r1, r2] = inst.R_curves(M);
        ll = 0.5 * (std::log(r1) + std::log(r2));
      } catch (const Error&) {
        ll = std::log(lam_seed);
      }
      sg = inst.profile().gamma;
      ok = newton2(fn, sg, ll, 1e-11, opts.newton_max, opts.fd_step_rel, sigma_lo, sigma_hi);
    }
    if (!ok) {
      br.gaps.emplace_back(last_good_M, M);
      prev_lambda.reset();
      prev_sigma = inst.profile().gamma;
      continue;
    }
    double lam = std::exp(ll);
    // verified defect of the reconstructed trajectory
    Shooter sh(inst, lam, opts);
    ShotResult shot = sh.shoot(sg, M, /*record=*/true);
    double defect = 0.0;
    try {
      GridFunction u(shot.nodes, shot.values);
      GridFunction hu = apply_H(inst, lam, u, opts.sigma_opts);
      defect = sup_diff(u, hu) / (1.0 + M);
    } catch (const Error&) {
      defect = std::numeric_limits<double>::quiet_NaN();
    }
    br.samples.push_back({M, lam, sg, defect});
    prev_sigma = sg;
    prev_lambda = lam;
    last_good_M = M;
  }
  return br;
}

Certificate verify_solution(const ProblemInstance& inst, double lambda, const GridFunction& u,
                            const CertifyTolerances& tols, const SigmaOptions& sigma_opts) {
  Certificate cert;
  ResidualReport rr = residual(inst, lambda, u, sigma_opts);
  cert.sup_residual = rr.sup_residual;
  cert.quasi_derivative_residual = rr.quasi_derivative_residual;
  cert.quasi_scale = rr.quasi_scale;
  cert.cone_margin_lemma21 = cone_margin(inst, u, ConeMode::lemma21);
  cert.cone_margin_coneK = cone_margin(inst, u, ConeMode::coneK);
  cert.boundary0 = std::fabs(u.values().front());
  cert.boundary1 = std::fabs(u.values().back());
  double norm = u.sup_norm();
  cert.pass = cert.sup_residual <= tols.sup_rel * (1.0 + norm) &&
              cert.quasi_derivative_residual <= tols.quasi_rel * (1.0 + cert.quasi_scale) &&
              cert.cone_margin_lemma21 >= -tols.cone_rel * (1.0 + norm) &&
              cert.cone_margin_coneK >= -tols.cone_rel * (1.0 + norm) &&
              cert.boundary0 <= tols.boundary_abs && cert.boundary1 <= tols.boundary_abs;
  return cert;
}

}  // namespace philap
