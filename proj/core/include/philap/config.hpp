#pragma once

#include <map>
#include <string>

#include "philap/problem.hpp"
#include "philap/solver.hpp"

namespace philap {

// Tunables mirrored from the [numerics] section; every documented default
// lives here rather than scattered through call sites.
struct Numerics {
  double quad_tol = 1e-12;
  int mesh_size = 257;
  double mesh_ratio = 0.85;
  double mgrid_lo = 1e-3;
  double mgrid_hi = 1e3;
  int mgrid_per_decade = 64;
  double solver_tol = 1e-7;
  double polish_target = 1e-7;
  double sigma_tol = 1e-10;
  double sigma_plateau = 1e-6;
  double tail_eps = 1e-4;
  int substeps = 8;
  double picard_damping = 1.0;
  int picard_max_iter = 300;
  double inverse_tol = 1e-12;
  double bracket_growth = 2.0;
  double membership_tol = 1e-9;
};

// A parsed problem config. Expression strings are stored after [params]
// substitution; the free-variable conventions are phi(x), psi1/psi2(y),
// c/d/h(t), f(s).
struct Config {
  std::map<std::string, std::map<std::string, std::string>> sections;

  Expression phi, psi1, psi2, c, d, h, f;
  std::optional<SupportHints> support;
  std::vector<SingularityHint> weight_hints;
  Numerics numerics;
  std::optional<double> run_lambda;

  bool is_annular = false;  // holds an [annular] section instead of problem data
  Expression ann_w, ann_A, ann_k;
  double ann_R1 = 0.0, ann_R2 = 0.0;
  int ann_N = 2;

  std::string stem;  // file stem for output naming
};

Config parse_config_text(const std::string& text, const std::string& name = "config");
Config load_config(const std::string& path);

ProblemInstance make_instance(const Config& cfg);
SolverOptions make_solver_options(const Config& cfg);
std::vector<double> make_m_grid(const Config& cfg);

// Serialized standard-form config for the interval problem induced by the
// annular data of `cfg` (which must carry an [annular] section).
std::string render_reduced_config(const Config& cfg);

}  // namespace philap
