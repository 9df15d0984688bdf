// Command-line front end: solve, study, verify, problems.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gwg/mesh.hpp"
#include "gwg/problems.hpp"
#include "gwg/solver.hpp"
#include "gwg/study.hpp"
#include "gwg/verify.hpp"

namespace
{

// Flags shared by every subcommand that builds a discretization. Anything left
// unset keeps the value from the config file (or the built-in default).
struct CommonFlags
{
  std::optional<std::string> config_file;
  std::optional<std::string> problem;
  std::optional<std::string> elements;
  std::optional<double> gamma, alpha, zeta, mu, rho, tfinal, floor_tau;
  std::optional<int> sigma, workers;
  std::optional<std::string> mesh, diagonal, pressure_gauge, tau_rule, out, format;
  bool allow_incompatible = false;

  void add(CLI::App* app)
  {
    app->add_option("--config", config_file, "JSON config file; flags override its values");
    app->add_option("--problem", problem, "manufactured problem name");
    app->add_option("--elements", elements, "degrees k,j,l,m,n");
    app->add_option("--gamma", gamma, "s1 exponent on h_T");
    app->add_option("--alpha", alpha, "s2 exponent on h_e");
    app->add_option("--zeta", zeta, "s1 weight");
    app->add_option("--sigma", sigma, "s2 switch (0 or 1)");
    app->add_option("--mu", mu, "viscosity");
    app->add_option("--rho", rho, "density");
    app->add_option("--mesh", mesh, "cells per side, comma separated (h = 1/N)");
    app->add_option("--diagonal", diagonal, "cell split: rising | falling");
    app->add_option("--pressure-gauge", pressure_gauge, "pressure representative for errors: zero-mean | first-element");
    app->add_option("--tau-rule", tau_rule, "h2 | fixed:<v> | list:<v,...>");
    app->add_option("--tfinal", tfinal, "final time");
    app->add_option("--floor-tau", floor_tau, "time studies: step of the extra run whose errors are removed as the spatial floor");
    app->add_option("--out", out, "output directory");
    app->add_option("--format", format, "csv | md | both");
    app->add_option("--workers", workers, "assembly worker threads");
    app->add_flag("--allow-incompatible", allow_incompatible, "skip the degree compatibility check");
  }

  gwg::StudyConfig resolve(gwg::StudyConfig base = {}) const
  {
    if (config_file) base = gwg::load_study_config(*config_file, base);
    if (problem) base.problem = *problem;
    if (elements) base.space = gwg::parse_elements(*elements, base.space);
    if (gamma) base.space.gamma = *gamma;
    if (alpha) base.space.alpha = *alpha;
    if (zeta) base.space.zeta = *zeta;
    if (sigma) base.space.sigma = *sigma;
    if (mu) base.space.mu = *mu;
    if (rho) base.space.rho = *rho;
    if (mesh) {
      base.meshes.clear();
      std::stringstream ss(*mesh);
      std::string item;
      while (std::getline(ss, item, ',')) {
        base.meshes.push_back(std::stoi(item));
      }
    }
    if (diagonal) base.diagonal = gwg::parse_diagonal(*diagonal);
    if (pressure_gauge) base.pressure_gauge = gwg::parse_pressure_gauge(*pressure_gauge);
    if (tau_rule) base.tau_rule = gwg::TauRule::parse(*tau_rule);
    if (tfinal) base.final_time = *tfinal;
    if (floor_tau) base.floor_tau = *floor_tau;
    if (out) base.out_dir = *out;
    if (format) base.format = gwg::parse_format(*format);
    if (workers) base.workers = *workers;
    if (allow_incompatible) base.allow_incompatible = true;
    return base;
  }
};

void print_errors(const gwg::ErrorReport& e)
{
  std::printf("energy error          %s\n", gwg::format_error(e.energy).c_str());
  std::printf("L2 velocity (proj)    %s\n", gwg::format_error(e.l2_velocity_proj).c_str());
  std::printf("L2 velocity (exact)   %s\n", gwg::format_error(e.l2_velocity_true).c_str());
  std::printf("L2 pressure (proj)    %s\n", gwg::format_error(e.l2_pressure_proj).c_str());
  std::printf("L2 pressure (exact)   %s\n", gwg::format_error(e.l2_pressure_true).c_str());
}

int run_solve(const gwg::StudyConfig& cfg)
{
  if (cfg.meshes.size() != 1) {
    throw std::invalid_argument("solve takes exactly one mesh size");
  }
  cfg.validate();
  const gwg::Problem problem = gwg::manufactured_problem(cfg.problem, cfg.space.mu, cfg.space.rho);
  const gwg::Mesh mesh = gwg::build_uniform_triangulation(static_cast<std::size_t>(cfg.meshes.front()), cfg.diagonal);
  gwg::SolveOptions options;
  options.assembly.workers = cfg.workers;
  options.allow_incompatible = cfg.allow_incompatible;
  gwg::DiscreteSolution solution;
  double worst = 0.0;
  if (problem.steady) {
    solution = gwg::solve_steady(mesh, cfg.space, problem, options);
    worst = solution.incompressibility_residual;
  } else {
    const double h = mesh.nominal_h();
    double tau = h * h;
    if (cfg.tau_rule.kind == gwg::TauRule::Kind::fixed) {
      tau = cfg.tau_rule.values.front();
    } else if (cfg.tau_rule.kind == gwg::TauRule::Kind::list) {
      throw std::invalid_argument("solve takes a single time step (h2 or fixed:<v>)");
    }
    const double tfinal = cfg.final_time > 0.0 ? cfg.final_time : problem.final_time;
    const gwg::TimeGrid grid = gwg::TimeGrid::from_step_size(tfinal, tau);
    solution = gwg::solve_evolutionary(mesh, cfg.space, problem, grid, options,
                                       [&](std::size_t, const gwg::DiscreteSolution& s) {
                                         worst = std::max(worst, s.incompressibility_residual);
                                       });
  }
  std::printf("problem %s, elements %s, h = 1/%d, t = %g\n", cfg.problem.c_str(),
              cfg.space.element_string().c_str(), cfg.meshes.front(), solution.time);
  print_errors(gwg::evaluate_errors(mesh, cfg.space, solution, problem, cfg.pressure_gauge));
  std::printf("max incompressibility residual %s\n", gwg::format_error(worst).c_str());
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream out(cfg.out_dir / "solution.csv");
  gwg::write_solution(out, mesh, cfg.space, solution);
  std::printf("solution written to %s\n", (cfg.out_dir / "solution.csv").string().c_str());
  return 0;
}

int run_study(const gwg::StudyConfig& cfg)
{
  const gwg::ConvergenceReport report = gwg::run_convergence_study(cfg);
  std::cout << report.markdown();
  std::printf("\nreports written to %s (%.1f s)\n", cfg.out_dir.string().c_str(), report.seconds);
  return 0;
}

int run_verify(const gwg::StudyConfig& cfg, std::size_t trials, std::uint64_t seed)
{
  cfg.space.validate(cfg.allow_incompatible);
  const gwg::Problem problem = gwg::manufactured_problem(cfg.problem, cfg.space.mu, cfg.space.rho);
  gwg::AssemblyOptions options;
  options.workers = cfg.workers;
  bool ok = true;
  std::printf("elements %s\n", cfg.space.element_string().c_str());
  for (int n : cfg.meshes) {
    const gwg::Mesh mesh = gwg::build_uniform_triangulation(static_cast<std::size_t>(n), cfg.diagonal);
    const gwg::WeakIdentityReport ids = gwg::check_weak_identities(mesh, cfg.space, trials, seed);
    const double kernel = gwg::energy_kernel_eigenvalue(mesh, cfg.space, options);
    const double infsup = gwg::estimate_infsup(mesh, cfg.space, options);
    const double coercivity = gwg::estimate_coercivity(mesh, cfg.space, problem.beta_field(), options);
    std::printf("h = 1/%d\n", n);
    std::printf("  weak-gradient identities  max residual %.3e over %zu trials: %s\n", ids.max_residual(), trials,
                ids.passed() ? "ok" : "FAILED");
    std::printf("  energy kernel eigenvalue  %.6e: %s\n", kernel, kernel > 0.0 ? "ok" : "FAILED");
    std::printf("  inf-sup estimate          %.6e: %s\n", infsup, infsup > 0.0 ? "ok" : "FAILED");
    std::printf("  coercivity (scaled)       %.6e\n", coercivity);
    ok = ok && ids.passed() && kernel > 0.0 && infsup > 0.0;
  }
  return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Generalized weak Galerkin solver for the Oseen equations on the unit square"};
  app.require_subcommand(1);

  CommonFlags solve_flags, study_flags, verify_flags;
  CLI::App* solve = app.add_subcommand("solve", "single solve with error report and solution dump");
  solve_flags.add(solve);
  CLI::App* study = app.add_subcommand("study", "convergence study with CSV/Markdown reports");
  study_flags.add(study);
  CLI::App* verify = app.add_subcommand("verify", "structural diagnostics of the discretization");
  verify_flags.add(verify);
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  verify->add_option("--trials", trials, "random trials for the weak-gradient identities");
  verify->add_option("--seed", seed, "random seed");
  CLI::App* problems = app.add_subcommand("problems", "list the manufactured problems");

  CLI11_PARSE(app, argc, argv);

  try {
    if (problems->parsed()) {
      for (const std::string& name : gwg::problem_names()) {
        std::printf("%-24s %s\n", name.c_str(), gwg::manufactured_problem(name).description.c_str());
      }
      return 0;
    }
    if (solve->parsed()) {
      gwg::StudyConfig base;
      base.meshes = {16};
      base.out_dir = "solve_out";
      gwg::StudyConfig cfg = solve_flags.resolve(base);
      if (!solve_flags.tau_rule && !solve_flags.config_file &&
          !gwg::manufactured_problem(cfg.problem, cfg.space.mu, cfg.space.rho).steady) {
        cfg.tau_rule.kind = gwg::TauRule::Kind::h2;
      }
      return run_solve(cfg);
    }
    if (study->parsed()) {
      return run_study(study_flags.resolve());
    }
    if (verify->parsed()) {
      gwg::StudyConfig base;
      base.meshes = {4, 8};
      return run_verify(verify_flags.resolve(base), trials, seed);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
