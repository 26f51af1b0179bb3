#include "philap/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace philap {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// constant expression -> number, so config values may be written as "1/16"
double parse_number(const std::string& text, const std::string& what) {
  try {
    Expression e = Expression::parse(text, "_none_");
    return e(0.0);
  } catch (const Error&) {
    throw InvariantError("could not read a number for " + what + " from '" + text + "'");
  }
}

int parse_int(const std::string& text, const std::string& what) {
  double v = parse_number(text, what);
  if (v != std::floor(v)) throw InvariantError(what + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace

Config parse_config_text(const std::string& text, const std::string& name) {
  Config cfg;
  cfg.stem = name;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw InvariantError(name + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections[section];
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos || section.empty())
      throw InvariantError(name + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw InvariantError(name + ":" + std::to_string(lineno) + ": empty key");
    cfg.sections[section][key] = value;
  }

  auto get = [&](const std::string& sec, const std::string& key) -> std::optional<std::string> {
    auto s = cfg.sections.find(sec);
    if (s == cfg.sections.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
  };
  auto require = [&](const std::string& sec, const std::string& key) {
    auto v = get(sec, key);
    if (!v) throw InvariantError(name + ": missing [" + sec + "] " + key);
    return *v;
  };

  // [params] substitution: every parameter becomes a parenthesized literal
  // inside the expression strings, applied in one textual pass at load.
  std::map<std::string, std::string> params;
  if (auto s = cfg.sections.find("params"); s != cfg.sections.end()) {
    for (auto& [k, v] : s->second) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", parse_number(v, "param " + k));
      params[k] = buf;
    }
  }
  auto substituted = [&](std::string src) {
    for (auto& [k, v] : params) src = substitute_identifier(src, k, v);
    return src;
  };

  // numerics
  Numerics& nm = cfg.numerics;
  auto num = [&](const char* key, double& slot) {
    if (auto v = get("numerics", key)) slot = parse_number(*v, key);
  };
  auto numi = [&](const char* key, int& slot) {
    if (auto v = get("numerics", key)) slot = parse_int(*v, key);
  };
  num("quad_tol", nm.quad_tol);
  numi("mesh_size", nm.mesh_size);
  num("mesh_ratio", nm.mesh_ratio);
  num("mgrid_lo", nm.mgrid_lo);
  num("mgrid_hi", nm.mgrid_hi);
  numi("mgrid_per_decade", nm.mgrid_per_decade);
  num("solver_tol", nm.solver_tol);
  num("polish_target", nm.polish_target);
  num("sigma_tol", nm.sigma_tol);
  num("sigma_plateau", nm.sigma_plateau);
  num("tail_eps", nm.tail_eps);
  numi("substeps", nm.substeps);
  num("picard_damping", nm.picard_damping);
  numi("picard_max_iter", nm.picard_max_iter);
  num("inverse_tol", nm.inverse_tol);
  num("bracket_growth", nm.bracket_growth);
  num("membership_tol", nm.membership_tol);

  if (auto v = get("run", "lambda")) cfg.run_lambda = parse_number(*v, "lambda");

  if (cfg.sections.count("annular")) {
    cfg.is_annular = true;
    cfg.ann_w = Expression::parse(substituted(require("annular", "w")), "r");
    cfg.ann_A = Expression::parse(substituted(require("annular", "bigA")), "r");
    cfg.ann_k = Expression::parse(substituted(require("annular", "k")), "r");
    cfg.ann_R1 = parse_number(require("annular", "R1"), "R1");
    cfg.ann_R2 = parse_number(require("annular", "R2"), "R2");
    cfg.ann_N = parse_int(require("annular", "N"), "N");
    cfg.psi1 = Expression::parse(substituted(require("homeo", "psi1")), "y");
    cfg.psi2 = Expression::parse(substituted(require("homeo", "psi2")), "y");
    cfg.f = Expression::parse(substituted(require("nonlinearity", "f")), "s");
    return cfg;
  }

  cfg.phi = Expression::parse(substituted(require("homeo", "phi")), "x");
  cfg.psi1 = Expression::parse(substituted(require("homeo", "psi1")), "y");
  cfg.psi2 = Expression::parse(substituted(require("homeo", "psi2")), "y");
  cfg.c = Expression::parse(substituted(require("coefficients", "c")), "t");
  cfg.d = Expression::parse(substituted(require("coefficients", "d")), "t");
  cfg.h = Expression::parse(substituted(require("weight", "h")), "t");
  cfg.f = Expression::parse(substituted(require("nonlinearity", "f")), "s");

  if (auto v = get("weight", "support")) {
    std::istringstream ss(substituted(*v));
    std::string a, ab, bb, b;
    if (!(ss >> a >> ab >> bb >> b))
      throw InvariantError("weight support hint needs four values: alpha alpha_bar beta_bar beta");
    cfg.support = SupportHints{parse_number(a, "alpha"), parse_number(ab, "alpha_bar"),
                               parse_number(bb, "beta_bar"), parse_number(b, "beta")};
  }
  if (auto v = get("weight", "singular_left")) {
    SingularityHint hint{SingularityHint::Side::left, std::nullopt};
    std::string t = trim(substituted(*v));
    if (!t.empty()) hint.exponent = parse_number(t, "singular_left");
    cfg.weight_hints.push_back(hint);
  }
  if (auto v = get("weight", "singular_right")) {
    SingularityHint hint{SingularityHint::Side::right, std::nullopt};
    std::string t = trim(substituted(*v));
    if (!t.empty()) hint.exponent = parse_number(t, "singular_right");
    cfg.weight_hints.push_back(hint);
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvariantError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string stem = path;
  if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
  if (auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  Config cfg = parse_config_text(buf.str(), path);
  cfg.stem = stem;
  return cfg;
}

ProblemInstance make_instance(const Config& cfg) {
  if (cfg.is_annular)
    throw InvariantError("annular configs must be reduced before analysis");
  HomeoBundle bundle(cfg.phi, cfg.psi1, cfg.psi2, cfg.numerics.inverse_tol,
                     cfg.numerics.bracket_growth);
  return ProblemInstance(std::move(bundle), cfg.c, cfg.d, cfg.h, cfg.f, cfg.weight_hints,
                         cfg.support, cfg.numerics.quad_tol);
}

SolverOptions make_solver_options(const Config& cfg) {
  SolverOptions o;
  o.tol = cfg.numerics.solver_tol;
  o.polish_target = cfg.numerics.polish_target;
  o.mesh_size = cfg.numerics.mesh_size;
  o.mesh_ratio = cfg.numerics.mesh_ratio;
  o.tail_eps = cfg.numerics.tail_eps;
  o.substeps = cfg.numerics.substeps;
  o.sigma_opts.tol = cfg.numerics.sigma_tol;
  o.sigma_opts.plateau_width = cfg.numerics.sigma_plateau;
  return o;
}

std::vector<double> make_m_grid(const Config& cfg) {
  return log_grid(cfg.numerics.mgrid_lo, cfg.numerics.mgrid_hi, cfg.numerics.mgrid_per_decade);
}

std::string render_reduced_config(const Config& cfg) {
  if (!cfg.is_annular) throw InvariantError("reduce needs a config with an [annular] section");
  ReducedForms forms = reduce_annular(cfg.ann_w, cfg.ann_A, cfg.ann_k, cfg.ann_R1, cfg.ann_R2,
                                      cfg.ann_N);
  std::ostringstream out;
  out << "# interval form of the annular problem (radii " << cfg.ann_R1 << ".." << cfg.ann_R2
      << ", dimension " << cfg.ann_N << ")\n";
  out << "[homeo]\n";
  out << "phi = " << forms.phi_src << "\n";
  out << "psi1 = " << cfg.psi1.source() << "\n";
  out << "psi2 = " << cfg.psi2.source() << "\n\n";
  out << "[coefficients]\n";
  out << "c = " << forms.c_src << "\n";
  out << "d = " << forms.d_src << "\n\n";
  out << "[weight]\n";
  out << "h = " << forms.h_src << "\n\n";
  out << "[nonlinearity]\n";
  out << "f = " << cfg.f.source() << "\n";

  auto copy_section = [&](const char* sec) {
    auto s = cfg.sections.find(sec);
    if (s == cfg.sections.end() || s->second.empty()) return;
    out << "\n[" << sec << "]\n";
    for (const auto& [k, v] : s->second) out << k << " = " << v << "\n";
  };
  copy_section("numerics");
  copy_section("run");
  return out.str();
}

}  // namespace philap
