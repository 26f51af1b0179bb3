#include "philap/theorems.hpp"

#include <algorithm>
#include <cmath>

namespace philap {

namespace {

constexpr double kGolden = 0.6180339887498949;

struct Curves {
  std::vector<double> m, R1, R2;
};

Curves evaluate_curves(const ProblemInstance& inst, std::span<const double> scan) {
  Curves c;
  c.m.assign(scan.begin(), scan.end());
  c.R1.resize(c.m.size());
  c.R2.resize(c.m.size());
  for (std::size_t i = 0; i < c.m.size(); ++i) {
    auto [r1, r2] = inst.R_curves(c.m[i]);
    c.R1[i] = r1;
    c.R2[i] = r2;
  }
  return c;
}

double shell_separation(const std::vector<double>& w) {
  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < w.size(); ++i) sep = std::min(sep, std::log(w[i] / w[i - 1]));
  return sep;
}

struct Candidate {
  double lo = 0.0, hi = 0.0;
  std::vector<double> witnesses;
  bool better_than(const Candidate& o) const {
    double len = hi - lo, olen = o.hi - o.lo;
    if (len != olen) return len > olen;
    double s = shell_separation(witnesses), os = shell_separation(o.witnesses);
    if (s != os) return s > os;
    return witnesses.front() < o.witnesses.front();
  }
  bool nonempty() const { return hi > lo && !witnesses.empty(); }
};

}  // namespace

std::optional<Window> existence_window(const ProblemInstance& inst, double m1, double m2) {
  if (!(m1 > 0.0 && m2 > 0.0) || m1 == m2)
    throw InvariantError("existence window needs two distinct positive norms");
  auto [r1m1, _unused] = inst.R_curves(m1);
  auto [_unused2, r2m2] = inst.R_curves(m2);
  if (!(r1m1 < r2m2)) return std::nullopt;
  Window w;
  w.lambda_low = r1m1;
  w.lambda_high = r2m2;
  w.predicted_count = 1;
  w.shells = {{std::min(m1, m2), std::max(m1, m2)}};
  w.witnesses = {m1, m2};
  w.provenance = "single-shell window: norm expansion below, contraction above";
  return w;
}

std::vector<Window> multiplicity_windows(const ProblemInstance& inst,
                                         std::span<const double> scan) {
  std::vector<Window> out;
  if (scan.size() < 4) return out;
  Curves c = evaluate_curves(inst, scan);
  const std::size_t n = c.m.size();

  // prefix/suffix extrema of each curve with the achieving index
  std::vector<std::size_t> pre_min_R1(n), pre_max_R2(n), suf_min_R1(n), suf_max_R2(n);
  for (std::size_t i = 0; i < n; ++i) {
    pre_min_R1[i] = (i == 0 || c.R1[i] < c.R1[pre_min_R1[i - 1]]) ? i : pre_min_R1[i - 1];
    pre_max_R2[i] = (i == 0 || c.R2[i] > c.R2[pre_max_R2[i - 1]]) ? i : pre_max_R2[i - 1];
  }
  for (std::size_t ri = n; ri-- > 0;) {
    suf_min_R1[ri] = (ri + 1 == n || c.R1[ri] < c.R1[suf_min_R1[ri + 1]]) ? ri : suf_min_R1[ri + 1];
    suf_max_R2[ri] = (ri + 1 == n || c.R2[ri] > c.R2[suf_max_R2[ri + 1]]) ? ri : suf_max_R2[ri + 1];
  }

  // Three-solution orderings. Witness roles by position:
  //   pattern A: (m2, m1, M2, M1) -> window (max{R1@2,R1@4}, min{R2@1,R2@3})
  //   pattern B: (m1, m2, M1, M2) -> window (max{R1@1,R1@3}, min{R2@2,R2@4})
  Candidate bestA, bestB;
  for (std::size_t b = 1; b + 2 < n; ++b) {
    for (std::size_t cidx = b + 1; cidx + 1 < n; ++cidx) {
      {
        std::size_t a = pre_max_R2[b - 1];
        std::size_t d = suf_min_R1[cidx + 1];
        double lo = std::max(c.R1[b], c.R1[d]);
        double hi = std::min(c.R2[a], c.R2[cidx]);
        Candidate cand{lo, hi, {c.m[a], c.m[b], c.m[cidx], c.m[d]}};
        if (cand.nonempty() && (!bestA.nonempty() || cand.better_than(bestA))) bestA = cand;
      }
      {
        std::size_t a = pre_min_R1[b - 1];
        std::size_t d = suf_max_R2[cidx + 1];
        double lo = std::max(c.R1[a], c.R1[cidx]);
        double hi = std::min(c.R2[b], c.R2[d]);
        Candidate cand{lo, hi, {c.m[a], c.m[b], c.m[cidx], c.m[d]}};
        if (cand.nonempty() && (!bestB.nonempty() || cand.better_than(bestB))) bestB = cand;
      }
    }
  }

  // Two-solution orderings:
  //   pattern A: (m1, m2, M1) -> window (max{R1@1,R1@3}, R2@2)
  //   pattern B: (m2, m1, M2) -> window (R1@2, min{R2@1,R2@3})
  Candidate best2A, best2B;
  for (std::size_t b = 1; b + 1 < n; ++b) {
    {
      std::size_t a = pre_min_R1[b - 1];
      std::size_t cc = suf_min_R1[b + 1];
      double lo = std::max(c.R1[a], c.R1[cc]);
      double hi = c.R2[b];
      Candidate cand{lo, hi, {c.m[a], c.m[b], c.m[cc]}};
      if (cand.nonempty() && (!best2A.nonempty() || cand.better_than(best2A))) best2A = cand;
    }
    {
      std::size_t a = pre_max_R2[b - 1];
      std::size_t cc = suf_max_R2[b + 1];
      double lo = c.R1[b];
      double hi = std::min(c.R2[a], c.R2[cc]);
      Candidate cand{lo, hi, {c.m[a], c.m[b], c.m[cc]}};
      if (cand.nonempty() && (!best2B.nonempty() || cand.better_than(best2B))) best2B = cand;
    }
  }

  auto emit = [&](const Candidate& cand, int count, const char* prov) {
    if (!cand.nonempty()) return;
    Window w;
    w.lambda_low = cand.lo;
    w.lambda_high = cand.hi;
    w.predicted_count = count;
    w.witnesses = cand.witnesses;
    for (std::size_t i = 0; i + 1 < cand.witnesses.size(); ++i)
      w.shells.emplace_back(cand.witnesses[i], cand.witnesses[i + 1]);
    w.provenance = prov;
    out.push_back(std::move(w));
  };
  emit(bestA, 3, "three shells: contraction, expansion, contraction, expansion outward");
  emit(bestB, 3, "three shells, mirrored orientation");
  emit(best2A, 2, "two shells: expansion bracketed by contraction at the middle norm");
  emit(best2B, 2, "two shells, mirrored orientation");

  std::sort(out.begin(), out.end(), [](const Window& a, const Window& b) {
    if (a.predicted_count != b.predicted_count) return a.predicted_count > b.predicted_count;
    return (a.lambda_high - a.lambda_low) > (b.lambda_high - b.lambda_low);
  });
  return out;
}

namespace {

struct ScanExtremum {
  double value;
  double at_m;
  bool at_upper_edge;
};

// extremum of R1 or R2 over the scan, extending the upper edge up to three
// times when the extremum sits there
ScanExtremum scan_extremum(const ProblemInstance& inst, std::span<const double> scan,
                           bool use_R1, bool minimize) {
  std::vector<double> grid(scan.begin(), scan.end());
  for (int ext = 0; ext <= 3; ++ext) {
    double best = minimize ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
    std::size_t ibest = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto [r1, r2] = inst.R_curves(grid[i]);
      double v = use_R1 ? r1 : r2;
      if (minimize ? (v < best) : (v > best)) {
        best = v;
        ibest = i;
      }
    }
    if (ibest + 1 < grid.size() || ext == 3)
      return {best, grid[ibest], ibest + 1 == grid.size()};
    // extend one decade at the same density
    double hi = grid.back();
    std::size_t per_dec = std::max<std::size_t>(4, grid.size() / 6);
    for (std::size_t k = 1; k <= per_dec; ++k)
      grid.push_back(hi * std::pow(10.0, static_cast<double>(k) / per_dec));
  }
  return {0.0, 0.0, true};
}

bool limit_is_zero_or_finite(const FLimit& l) {
  return l.cls == LimitClass::zero || l.cls == LimitClass::finite;
}

bool limit_is_positive(const FLimit& l) {
  return l.cls == LimitClass::infinite || (l.cls == LimitClass::finite && l.value > 0.0);
}

}  // namespace

std::pair<std::optional<double>, std::optional<double>> nonexistence_bounds(
    const ProblemInstance& inst) {
  FLimits lims = inst.f_limits();
  std::optional<double> lambda_bar, lambda_under;

  // sampled sup/inf of f/phi on a 2001-point log grid with golden refinement
  auto ratio = [&](double ls) {
    double s = std::pow(10.0, ls);
    return inst.f(s) / inst.homeo().phi(s);
  };
  constexpr int kN = 2001;
  double sup_r = -std::numeric_limits<double>::infinity();
  double inf_r = std::numeric_limits<double>::infinity();
  int isup = 0, iinf = 0;
  for (int i = 0; i < kN; ++i) {
    double ls = -8.0 + 16.0 * i / (kN - 1);
    double r = ratio(ls);
    if (r > sup_r) {
      sup_r = r;
      isup = i;
    }
    if (r < inf_r) {
      inf_r = r;
      iinf = i;
    }
  }
  auto refine = [&](int i, bool maximize) {
    double a = -8.0 + 16.0 * std::max(0, i - 1) / (kN - 1);
    double b = -8.0 + 16.0 * std::min(kN - 1, i + 1) / (kN - 1);
    double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
    double f1 = ratio(x1), f2 = ratio(x2);
    for (int it = 0; it < 60; ++it) {
      bool keep_left = maximize ? (f1 > f2) : (f1 < f2);
      if (keep_left) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kGolden * (b - a);
        f1 = ratio(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kGolden * (b - a);
        f2 = ratio(x2);
      }
    }
    return maximize ? std::max(f1, f2) : std::min(f1, f2);
  };
  sup_r = std::max(sup_r, refine(isup, true));
  inf_r = std::min(inf_r, refine(iinf, false));

  const DerivedConstants& k = inst.constants();
  if (limit_is_zero_or_finite(lims.f0) && limit_is_zero_or_finite(lims.finf) && sup_r > 0.0) {
    lambda_bar = (inst.d0() / sup_r) * inst.homeo().psi1(inst.c0() / k.h_upper.value);
  }
  if (limit_is_positive(lims.f0) && limit_is_positive(lims.finf) && inf_r > 0.0) {
    lambda_under =
        (inst.d_max() / (k.h_star.value * inf_r)) * inst.homeo().psi2(inst.c_max() / k.gamma0);
  }
  return {lambda_bar, lambda_under};
}

CaseReport classify_case(const ProblemInstance& inst, std::span<const double> scan) {
  CaseReport rep;
  rep.limits = inst.f_limits();
  const LimitClass f0 = rep.limits.f0.cls, fi = rep.limits.finf.cls;

  if (f0 == LimitClass::inconclusive || fi == LimitClass::inconclusive) {
    rep.case_id = 0;
    rep.predicted = "limit classification inconclusive; no thresholds derived";
    rep.method = "log-grid ratio trend, factor-10 rule over 4 decades";
    return rep;
  }

  auto is0 = [](LimitClass c) { return c == LimitClass::zero; };
  auto isI = [](LimitClass c) { return c == LimitClass::infinite; };
  auto isF = [](LimitClass c) { return c == LimitClass::finite; };

  if ((is0(f0) && isI(fi)) || (isI(f0) && is0(fi))) {
    rep.case_id = 1;
    rep.predicted = "a positive solution exists for every lambda > 0";
  } else if ((is0(f0) && isF(fi)) || (isF(f0) && is0(fi))) {
    rep.case_id = 2;
    rep.predicted = "positive solutions for lambda above the R1 scan minimum";
  } else if ((isI(f0) && isF(fi)) || (isF(f0) && isI(fi))) {
    rep.case_id = 3;
    rep.predicted = "positive solutions for lambda below the R2 scan maximum";
  } else if (is0(f0) && is0(fi)) {
    rep.case_id = 4;
    rep.predicted = "two positive solutions for all large lambda";
  } else if (isI(f0) && isI(fi)) {
    rep.case_id = 5;
    rep.predicted = "two positive solutions for all small lambda";
  } else {
    rep.case_id = 6;  // both limits finite: only the nonexistence bounds apply
    rep.predicted = "finite limits at both ends; solvable lambda set is bounded";
  }

  rep.nonexistence_below = limit_is_zero_or_finite(rep.limits.f0) &&
                           limit_is_zero_or_finite(rep.limits.finf);
  rep.nonexistence_above =
      limit_is_positive(rep.limits.f0) && limit_is_positive(rep.limits.finf);

  if (rep.case_id == 2 || rep.case_id == 4) {
    ScanExtremum e = scan_extremum(inst, scan, /*use_R1=*/true, /*minimize=*/true);
    rep.lambda_star = e.value;
    rep.m_star = e.at_upper_edge ? std::numeric_limits<double>::infinity() : e.at_m;
  }
  if (rep.case_id == 3 || rep.case_id == 5) {
    ScanExtremum e = scan_extremum(inst, scan, /*use_R1=*/false, /*minimize=*/false);
    rep.lambda_upper_star = e.value;
    rep.m_upper_star = e.at_upper_edge ? std::numeric_limits<double>::infinity() : e.at_m;
  }
  if (rep.nonexistence_below || rep.nonexistence_above) {
    auto [bar, under] = nonexistence_bounds(inst);
    rep.lambda_bar = bar;
    rep.lambda_underline = under;
  }
  rep.method =
      "limits by log-grid ratio trend; thresholds are scan extrema; nonexistence "
      "bounds use sampled sup/inf of f/phi (2001-point log grid, golden refinement)";
  return rep;
}

ShellVerdict shell_index_check(const ProblemInstance& inst, double lambda, double m,
                               std::span<const GridFunction> profiles,
                               const SigmaOptions& sigma_opts) {
  if (!(m > 0.0)) throw InvariantError("shell radius must be positive");
  bool all_above = true, all_below = true;
  for (const GridFunction& v : profiles) {
    double out = apply_H(inst, lambda, v, sigma_opts).sup_norm();
    if (!(out > m)) all_above = false;
    if (!(out < m)) all_below = false;
  }
  if (all_above) return ShellVerdict::expanding;
  if (all_below) return ShellVerdict::contracting;
  return ShellVerdict::inconclusive;
}

std::vector<GridFunction> default_shell_profiles(const ProblemInstance& inst, double m,
                                                 int mesh_size) {
  const WeightProfile& p = inst.profile();
  const double rho_h = inst.constants().rho_h;
  std::vector<double> nodes = GridFunction::graded_mesh(mesh_size);
  for (double extra : {p.gamma1, p.gamma, p.gamma2}) {
    bool present = false;
    for (double nn : nodes)
      if (std::fabs(nn - extra) < 1e-12) present = true;
    if (!present) nodes.push_back(extra);
  }
  std::sort(nodes.begin(), nodes.end());

  auto tent = [](double peak) {
    return [peak](double t) {
      return t <= peak ? t / peak : (1.0 - t) / (1.0 - peak);
    };
  };
  std::vector<std::function<double(double)>> shapes;
  shapes.push_back(tent(p.gamma));
  shapes.push_back(tent(p.gamma1));
  shapes.push_back(tent(p.gamma2));
  shapes.push_back([](double t) { return 4.0 * t * (1.0 - t); });
  shapes.push_back([&p](double t) {
    double up = t / p.gamma1, down = (1.0 - t) / (1.0 - p.gamma2);
    return std::clamp(std::min(up, down), 0.0, 1.0);
  });
  shapes.push_back([](double t) { return std::sin(3.14159265358979323846 * t); });

  std::vector<GridFunction> out;
  for (const auto& shape : shapes) {
    std::vector<double> vals(nodes.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      vals[i] = std::max(shape(nodes[i]), 0.0);
      peak = std::max(peak, vals[i]);
    }
    for (double& v : vals) v *= m / peak;
    // project into the cone: at least rho_h*m across the core interval
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i] >= p.gamma1 && nodes[i] <= p.gamma2) vals[i] = std::max(vals[i], rho_h * m);
    vals.front() = 0.0;
    vals.back() = 0.0;
    out.emplace_back(nodes, std::move(vals));
  }
  return out;
}

BranchTrend branch_trend(const Branch& br, const TrendThresholds& thr) {
  if (br.samples.size() < 2) return BranchTrend::flat;
  bool any_up = false, any_down = false;
  for (std::size_t i = 1; i < br.samples.size(); ++i) {
    double a = br.samples[i - 1].lambda, b = br.samples[i].lambda;
    double tol = thr.flat_rel * std::max(std::fabs(a), std::fabs(b));
    if (b > a + tol) any_up = true;
    if (b < a - tol) any_down = true;
  }
  if (any_up && any_down) return BranchTrend::nonmonotone;
  if (any_up) return BranchTrend::increasing;
  if (any_down) return BranchTrend::decreasing;
  return BranchTrend::flat;
}

}  // namespace philap
