#include "philap/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "philap/reports.hpp"

namespace philap::cli {

namespace {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvariantError("cannot write '" + tmp.string() + "'");
    out << content;
  }
  fs::rename(tmp, path);
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  double tol = 0.0;       // 0 = keep config value
  int mesh = 0;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double mgrid_lo = 0.0, mgrid_hi = 0.0;
  int mgrid_per_decade = 0;
};

Config load_with_overrides(const CommonArgs& a) {
  Config cfg = load_config(a.config_path);
  if (a.tol > 0.0) cfg.numerics.quad_tol = a.tol;
  if (a.mesh > 0) cfg.numerics.mesh_size = a.mesh;
  if (a.mgrid_lo > 0.0) cfg.numerics.mgrid_lo = a.mgrid_lo;
  if (a.mgrid_hi > 0.0) cfg.numerics.mgrid_hi = a.mgrid_hi;
  if (a.mgrid_per_decade > 0) cfg.numerics.mgrid_per_decade = a.mgrid_per_decade;
  if (!std::isnan(a.lambda)) cfg.run_lambda = a.lambda;
  return cfg;
}

int cmd_analyze(const CommonArgs& a) {
  Config cfg = load_with_overrides(a);
  ProblemInstance inst = make_instance(cfg);
  std::string report = render_constants_report(inst, cfg);
  fs::path out = fs::path(a.out_dir) / (cfg.stem + ".constants.report.txt");
  write_atomic(out, report);
  std::cout << report;
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_certify(const CommonArgs& a) {
  Config cfg = load_with_overrides(a);
  ProblemInstance inst = make_instance(cfg);
  std::string report = render_certify_report(inst, cfg);
  fs::path out = fs::path(a.out_dir) / (cfg.stem + ".certify.report.txt");
  write_atomic(out, report);
  std::cout << report;
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_solve(const CommonArgs& a) {
  Config cfg = load_with_overrides(a);
  if (!cfg.run_lambda) throw InvariantError("solve needs --lambda or a [run] lambda entry");
  ProblemInstance inst = make_instance(cfg);
  std::vector<Solution> sols =
      solve_fixed_lambda(inst, *cfg.run_lambda, make_m_grid(cfg), make_solver_options(cfg));
  fs::path index = fs::path(a.out_dir) / (cfg.stem + ".solutions.csv");
  write_atomic(index, render_solutions_index_csv(sols));
  for (std::size_t i = 0; i < sols.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "%s.solution-%03zu.csv", cfg.stem.c_str(), i + 1);
    std::ostringstream os;
    sols[i].u.write_csv(os);
    write_atomic(fs::path(a.out_dir) / name, os.str());
  }
  std::cout << "found " << sols.size() << " solution(s) at lambda=" << *cfg.run_lambda << "\n";
  std::cout << render_solutions_index_csv(sols);
  std::cout << "wrote " << index.string() << "\n";
  return 0;
}

int cmd_branch(const CommonArgs& a) {
  Config cfg = load_with_overrides(a);
  ProblemInstance inst = make_instance(cfg);
  Branch br = continue_branch(inst, make_m_grid(cfg), make_solver_options(cfg));
  fs::path out = fs::path(a.out_dir) / (cfg.stem + ".branch.csv");
  write_atomic(out, render_branch_csv(br));
  std::cout << "computed " << br.samples.size() << " branch samples";
  if (!br.gaps.empty()) std::cout << " (" << br.gaps.size() << " continuation gaps)";
  std::cout << "\nwrote " << out.string() << "\n";
  if (br.samples.empty()) return 2;
  return 0;
}

int cmd_reduce(const CommonArgs& a) {
  Config cfg = load_with_overrides(a);
  std::string reduced = render_reduced_config(cfg);
  fs::path out = fs::path(a.out_dir) / (cfg.stem + ".reduced.cfg");
  write_atomic(out, reduced);
  std::cout << reduced;
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

// built-in fixture suite: quick closed-form checks of every layer
int cmd_selftest() {
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };
  auto near = [](double a, double b, double tol) { return std::fabs(a - b) <= tol; };

  try {
    Expression e = Expression::parse("x + x^2", "x");
    check("expression arithmetic", near(e(2.0), 6.0, 1e-15));

    Expression pw = Expression::parse(
        "piece(0<=t<0.0625 : 0; 0.0625<=t<1 : (t-0.0625)*(1-t)^(-1))", "t");
    check("piecewise window", pw(0.03) == 0.0 && pw(0.5) > 0.0);

    HomeoBundle hb(Expression::parse("x + x^2", "x"), Expression::parse("min(y, y^2)", "y"),
                   Expression::parse("max(y, y^2)", "y"));
    check("phi inversion round trip", near(hb.phi_inverse(6.0), 2.0, 1e-10));
    check("control pair inequality holds", hb.check_condition_A().pass);
    check("inverse sandwich holds", hb.check_inverse_sandwich().pass);

    HomeoBundle bad(Expression::parse("x + x^2", "x"), Expression::parse("y", "y"),
                    Expression::parse("y", "y"));
    check("identity control pair rejected", !bad.check_condition_A().pass);

    QuadResult q = integrate([](double t) { return 1.0 / std::sqrt(t); }, 0.0, 1.0, 1e-10,
                             {{SingularityHint::Side::left, 0.5}});
    check("endpoint-singular integral", q.converged && near(q.value, 2.0, 1e-9));

    QuadResult nw = nested_weight_integral([](double y) { return y; },
                                           [](double) { return 1.0; }, 0.5,
                                           AnchorSide::left_of_anchor, 0.0, 0.5, 1e-12);
    check("nested closed form", nw.converged && near(nw.value, 0.125, 1e-11));

    Expression one_t = Expression::parse("1", "t");
    Expression ex_h = Expression::parse(
        "piece(0<=t<0.0625 : 0; 0.0625<=t<1 : (t-0.0625)*(1-t)^(-1))", "t");
    WeightProfile wp = analyze_weight(ex_h);
    check("weight support scan",
          near(wp.alpha, 0.0625, 1e-8) && near(wp.alpha_bar, 1.0, 1e-8) &&
              near(wp.beta_bar, 0.0625, 1e-8) && near(wp.beta, 1.0, 1e-8));

    ProblemInstance flat(HomeoBundle(Expression::parse("x", "x"), Expression::parse("y", "y"),
                                     Expression::parse("y", "y")),
                         one_t, one_t, one_t, Expression::parse("s", "s"));
    check("reference constants",
          near(flat.constants().A1.value, 1.0 / 32.0, 1e-12) &&
              near(flat.constants().A2.value, 1.0 / 8.0, 1e-12));

    auto [lb, lu] = nonexistence_bounds(flat);
    check("nonexistence thresholds", lb && lu && near(*lb, 8.0, 1e-9) && near(*lu, 16.0, 1e-9));

    std::vector<double> mesh = GridFunction::graded_mesh(257);
    GridFunction tg = apply_T(flat, [](double) { return 1.0; }, mesh);
    double worst = 0.0;
    for (std::size_t i = 0; i < tg.size(); ++i) {
      double t = tg.nodes()[i];
      worst = std::max(worst, std::fabs(tg.values()[i] - 0.5 * t * (1.0 - t)));
    }
    check("operator parabola fixture", worst <= 1e-9);

    double nu34 = nu(flat, [](double) { return 1.0; }, 0.75);
    check("branch integral difference", near(nu34, 0.25, 1e-10));

    ProblemInstance cube(HomeoBundle(Expression::parse("x^2", "x"),
                                     Expression::parse("y^2", "y"),
                                     Expression::parse("y^2", "y")),
                         one_t, one_t, one_t, Expression::parse("s", "s"));
    GridFunction tg3 = apply_T(cube, [](double) { return 1.0; }, mesh);
    check("odd-power operator norm",
          near(tg3.sup_norm(), (2.0 / 3.0) * std::pow(0.5, 1.5), 1e-9));

    ProblemInstance quad_inst(HomeoBundle(Expression::parse("x", "x"),
                                          Expression::parse("y", "y"),
                                          Expression::parse("y", "y")),
                              one_t, one_t, one_t, Expression::parse("s^2", "s"));
    auto [fstar, fupper] = quad_inst.f_envelopes(1.0);
    check("envelopes of the square", near(fstar, 1.0 / 16.0, 1e-10) && near(fupper, 1.0, 1e-12));
    auto [r1, r2] = quad_inst.R_curves(1.0);
    check("R curves of the square", near(r1, 512.0, 1e-6) && near(r2, 8.0, 1e-8));
  } catch (const Error& e) {
    std::cout << "FAIL exception: " << e.what() << "\n";
    ++failures;
  }

  std::cout << (failures == 0 ? "selftest passed" : "selftest FAILED") << "\n";
  return failures == 0 ? 0 : 2;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"positive-solution laboratory for one-dimensional quasilinear Dirichlet problems"};
  app.require_subcommand(1);

  CommonArgs common;
  auto add_common = [&](CLI::App* sub, bool needs_config = true) {
    if (needs_config)
      sub->add_option("config", common.config_path, "problem config file")->required();
    sub->add_option("--out-dir", common.out_dir, "output directory");
    sub->add_option("--tol", common.tol, "quadrature tolerance override");
    sub->add_option("--mesh", common.mesh, "mesh size override");
    sub->add_option("--mgrid-lo", common.mgrid_lo, "m-grid lower bound");
    sub->add_option("--mgrid-hi", common.mgrid_hi, "m-grid upper bound");
    sub->add_option("--mgrid-per-decade", common.mgrid_per_decade, "m-grid density");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "constants report");
  add_common(analyze);
  CLI::App* solve = app.add_subcommand("solve", "solutions at a fixed lambda");
  add_common(solve);
  solve->add_option("--lambda", common.lambda, "parameter value");
  CLI::App* branch = app.add_subcommand("branch", "lambda(M) continuation CSV");
  add_common(branch);
  CLI::App* certify = app.add_subcommand("certify", "windows, thresholds and shell checks");
  add_common(certify);
  CLI::App* reduce = app.add_subcommand("reduce", "annular config to interval form");
  add_common(reduce);
  CLI::App* selftest = app.add_subcommand("selftest", "built-in fixture suite");
  (void)selftest;

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(analyze)) return cmd_analyze(common);
    if (app.got_subcommand(solve)) return cmd_solve(common);
    if (app.got_subcommand(branch)) return cmd_branch(common);
    if (app.got_subcommand(certify)) return cmd_certify(common);
    if (app.got_subcommand(reduce)) return cmd_reduce(common);
    if (app.got_subcommand(selftest)) return cmd_selftest();
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace philap::cli
