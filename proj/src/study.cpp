#include "gwg/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gwg/mesh.hpp"
#include "gwg/problems.hpp"

#ifndef GWG_COMMIT
#define GWG_COMMIT "unknown"
#endif

namespace gwg
{

namespace
{

std::vector<double> parse_list(const std::string& text)
{
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad number '" + item + "'");
    }
    if (used != item.size()) {
      throw std::invalid_argument("bad number '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

TauRule TauRule::parse(const std::string& text)
{
  TauRule rule;
  if (text.empty() || text == "none") {
    return rule;
  }
  if (text == "h2") {
    rule.kind = Kind::h2;
    return rule;
  }
  if (text.rfind("fixed:", 0) == 0) {
    rule.kind = Kind::fixed;
    rule.values = parse_list(text.substr(6));
    if (rule.values.size() != 1) {
      throw std::invalid_argument("tau rule 'fixed' takes exactly one value");
    }
  } else if (text.rfind("list:", 0) == 0) {
    rule.kind = Kind::list;
    rule.values = parse_list(text.substr(5));
    if (rule.values.empty()) {
      throw std::invalid_argument("tau rule 'list' needs at least one value");
    }
  } else {
    throw std::invalid_argument("unknown tau rule '" + text + "' (expected h2, fixed:<v> or list:<v,...>)");
  }
  for (double v : rule.values) {
    if (!(v > 0.0)) {
      throw std::invalid_argument("time steps must be positive");
    }
  }
  return rule;
}

std::string TauRule::to_string() const
{
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
  case Kind::none:
    return "none";
  case Kind::h2:
    return "h2";
  case Kind::fixed:
    os << "fixed:" << values.at(0);
    return os.str();
  case Kind::list:
    os << "list:";
    for (std::size_t i = 0; i < values.size(); ++i) {
      os << (i ? "," : "") << values[i];
    }
    return os.str();
  }
  return "none";
}

ReportFormat parse_format(const std::string& text)
{
  if (text == "csv") return ReportFormat::csv;
  if (text == "md") return ReportFormat::md;
  if (text == "both") return ReportFormat::both;
  throw std::invalid_argument("unknown format '" + text + "' (expected csv, md or both)");
}

void StudyConfig::validate() const
{
  space.validate(allow_incompatible);
  const Problem pb = manufactured_problem(problem, space.mu, space.rho);
  if (meshes.empty()) {
    throw std::invalid_argument("study needs at least one mesh");
  }
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    if (meshes[i] < 1) {
      throw std::invalid_argument("mesh sizes must be positive cell counts");
    }
    if (i > 0 && meshes[i] <= meshes[i - 1]) {
      throw std::invalid_argument("mesh list must be strictly decreasing in h");
    }
  }
  if (workers < 1) {
    throw std::invalid_argument("workers must be at least 1");
  }
  if (final_time < 0.0) {
    throw std::invalid_argument("final time must be nonnegative");
  }
  if (pb.steady && tau_rule.kind != TauRule::Kind::none) {
    throw std::invalid_argument("problem '" + problem + "' is steady; drop the tau rule");
  }
  if (!pb.steady && tau_rule.kind == TauRule::Kind::none) {
    throw std::invalid_argument("problem '" + problem + "' is evolutionary and needs a tau rule");
  }
  if (tau_rule.kind == TauRule::Kind::list && meshes.size() != 1 && meshes.size() != tau_rule.values.size()) {
    throw std::invalid_argument("tau list must have one entry per mesh, or a single mesh must be given");
  }
  if (floor_tau < 0.0) {
    throw std::invalid_argument("floor tau must be nonnegative");
  }
  if (floor_tau > 0.0) {
    if (tau_rule.kind != TauRule::Kind::list || meshes.size() != 1) {
      throw std::invalid_argument("floor tau needs a time study (a tau list on a single mesh)");
    }
    for (double tau : tau_rule.values) {
      if (!(floor_tau < tau)) {
        throw std::invalid_argument("floor tau must be smaller than every tau in the list");
      }
    }
  }
}

StudyConfig load_study_config(const std::filesystem::path& file, StudyConfig base)
{
  std::ifstream in(file);
  if (!in) {
    throw std::runtime_error("cannot open config file " + file.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config file " + file.string() + ": " + e.what());
  }
  if (!j.is_object()) {
    throw std::runtime_error("config file " + file.string() + " must hold a JSON object");
  }
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "problem") base.problem = value.get<std::string>();
      else if (key == "elements") base.space = parse_elements(value.get<std::string>(), base.space);
      else if (key == "gamma") base.space.gamma = value.get<double>();
      else if (key == "alpha") base.space.alpha = value.get<double>();
      else if (key == "zeta") base.space.zeta = value.get<double>();
      else if (key == "sigma") base.space.sigma = value.get<int>();
      else if (key == "mu") base.space.mu = value.get<double>();
      else if (key == "rho") base.space.rho = value.get<double>();
      else if (key == "mesh") base.meshes = value.get<std::vector<int>>();
      else if (key == "diagonal") base.diagonal = parse_diagonal(value.get<std::string>());
      else if (key == "pressure_gauge") base.pressure_gauge = parse_pressure_gauge(value.get<std::string>());
      else if (key == "tau_rule") base.tau_rule = TauRule::parse(value.get<std::string>());
      else if (key == "tfinal") base.final_time = value.get<double>();
      else if (key == "out") base.out_dir = value.get<std::string>();
      else if (key == "format") base.format = parse_format(value.get<std::string>());
      else if (key == "workers") base.workers = value.get<int>();
      else if (key == "allow_incompatible") base.allow_incompatible = value.get<bool>();
      else if (key == "floor_tau") base.floor_tau = value.get<double>();
      else throw std::runtime_error("unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config file " + file.string() + ": " + e.what());
  }
  return base;
}

std::vector<std::optional<double>> compute_order(const std::vector<double>& errors, const std::vector<double>& steps)
{
  if (errors.size() != steps.size()) {
    throw std::invalid_argument("compute_order: errors and steps differ in length");
  }
  std::vector<std::optional<double>> out(errors.size());
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (!(steps[i] < steps[i - 1]) || !(steps[i] > 0.0)) {
      throw std::invalid_argument("compute_order: steps must be positive and strictly decreasing");
    }
    if (errors[i] > 0.0 && errors[i - 1] > 0.0) {
      out[i] = std::log(errors[i - 1] / errors[i]) / std::log(steps[i - 1] / steps[i]);
    }
  }
  return out;
}

std::string format_error(double value)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4e", value);
  return buf;
}

std::string format_order(const std::optional<double>& value)
{
  if (!value) {
    return "";
  }
  char buf[64];
  // Avoid printing "-0.00".
  const double v = std::abs(*value) < 0.005 ? 0.0 : *value;
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

namespace
{

using Orders = std::vector<std::optional<double>>;

std::string csv_table(const std::vector<StudyRow>& rows, const Orders& oe, const Orders& ou, const Orders& op)
{
  std::ostringstream os;
  os << "h,tau,err_energy,ord_energy,err_l2u,ord_l2u,err_l2p,ord_l2p\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const StudyRow& r = rows[i];
    os << format_error(r.h) << ',' << format_error(r.tau) << ',' << format_error(r.errors.energy) << ','
       << format_order(oe[i]) << ',' << format_error(r.errors.l2_velocity_proj) << ',' << format_order(ou[i]) << ','
       << format_error(r.errors.l2_pressure_proj) << ',' << format_order(op[i]) << '\n';
  }
  return os.str();
}

std::string markdown_table(const std::vector<StudyRow>& rows, const Orders& oe, const Orders& ou, const Orders& op)
{
  std::ostringstream os;
  os << "| h | tau | energy error | order | L2 velocity error | order | L2 pressure error | order |\n";
  os << "|---|---|---|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const StudyRow& r = rows[i];
    os << "| " << format_error(r.h) << " | " << format_error(r.tau) << " | " << format_error(r.errors.energy) << " | "
       << format_order(oe[i]) << " | " << format_error(r.errors.l2_velocity_proj) << " | " << format_order(ou[i])
       << " | " << format_error(r.errors.l2_pressure_proj) << " | " << format_order(op[i]) << " |\n";
  }
  return os.str();
}

} // namespace

double remove_floor(double error, double floor)
{
  return error > floor ? std::sqrt((error - floor) * (error + floor)) : 0.0;
}

std::string ConvergenceReport::csv() const
{
  return csv_table(rows, order_energy, order_l2u, order_l2p);
}

std::string ConvergenceReport::subtracted_csv() const
{
  return csv_table(subtracted, subtracted_order_energy, subtracted_order_l2u, subtracted_order_l2p);
}

std::string ConvergenceReport::markdown() const
{
  std::ostringstream os;
  os << "Problem `" << config.problem << "`, elements " << config.space.element_string();
  if (time_study) {
    os << ", h = " << format_error(rows.empty() ? 0.0 : rows.front().h);
  }
  os << "\n\n" << markdown_table(rows, order_energy, order_l2u, order_l2p);
  if (floor) {
    os << "\nSpatial floor from tau = " << format_error(floor->tau) << ": energy " << format_error(floor->errors.energy)
       << ", L2 velocity " << format_error(floor->errors.l2_velocity_proj) << ", L2 pressure "
       << format_error(floor->errors.l2_pressure_proj) << ". Errors with the floor removed in quadrature:\n\n"
       << markdown_table(subtracted, subtracted_order_energy, subtracted_order_l2u, subtracted_order_l2p);
  }
  return os.str();
}

std::string ConvergenceReport::metadata_json() const
{
  nlohmann::json j;
  j["commit"] = GWG_COMMIT;
  j["problem"] = config.problem;
  j["elements"] = config.space.element_string();
  j["gamma"] = config.space.gamma;
  j["alpha"] = config.space.alpha;
  j["zeta"] = config.space.zeta;
  j["sigma"] = config.space.sigma;
  j["mu"] = config.space.mu;
  j["rho"] = config.space.rho;
  j["mesh"] = config.meshes;
  j["diagonal"] = diagonal_name(config.diagonal);
  j["pressure_gauge"] = pressure_gauge_name(config.pressure_gauge);
  j["tau_rule"] = config.tau_rule.to_string();
  j["tfinal"] = config.final_time;
  j["workers"] = config.workers;
  if (floor) {
    j["floor_tau"] = floor->tau;
    j["floor"] = {{"err_energy", floor->errors.energy},
                  {"err_l2u", floor->errors.l2_velocity_proj},
                  {"err_l2p", floor->errors.l2_pressure_proj},
                  {"seconds", floor->seconds}};
  }
  j["wall_seconds"] = seconds;
  j["rows"] = nlohmann::json::array();
  for (const StudyRow& r : rows) {
    j["rows"].push_back({{"cells", r.cells},
                         {"tau", r.tau},
                         {"steps", r.steps},
                         {"err_l2u_exact", r.errors.l2_velocity_true},
                         {"err_l2p_exact", r.errors.l2_pressure_true},
                         {"err_l2p_zero_mean", r.errors.l2_pressure_zero_mean},
                         {"max_incompressibility_residual", r.max_incompressibility},
                         {"seconds", r.seconds}});
  }
  return j.dump(2) + "\n";
}

namespace
{

struct Cell
{
  int cells;
  double tau;
};

std::vector<Cell> study_cells(const StudyConfig& config)
{
  std::vector<Cell> cells;
  const TauRule& rule = config.tau_rule;
  if (rule.kind == TauRule::Kind::list && config.meshes.size() == 1) {
    for (double tau : rule.values) {
      cells.push_back({config.meshes.front(), tau});
    }
    return cells;
  }
  for (std::size_t i = 0; i < config.meshes.size(); ++i) {
    const int n = config.meshes[i];
    const double h = 1.0 / n;
    double tau = 0.0;
    switch (rule.kind) {
    case TauRule::Kind::none: tau = 0.0; break;
    case TauRule::Kind::h2: tau = h * h; break;
    case TauRule::Kind::fixed: tau = rule.values.front(); break;
    case TauRule::Kind::list: tau = rule.values[i]; break;
    }
    cells.push_back({n, tau});
  }
  return cells;
}

void finish_orders(ConvergenceReport& report)
{
  std::vector<double> steps, energy, l2u, l2p;
  for (const StudyRow& r : report.rows) {
    steps.push_back(report.time_study ? r.tau : r.h);
    energy.push_back(r.errors.energy);
    l2u.push_back(r.errors.l2_velocity_proj);
    l2p.push_back(r.errors.l2_pressure_proj);
  }
  if (report.orders_suppressed) {
    report.order_energy.assign(report.rows.size(), std::nullopt);
    report.order_l2u = report.order_energy;
    report.order_l2p = report.order_energy;
    return;
  }
  report.order_energy = compute_order(energy, steps);
  report.order_l2u = compute_order(l2u, steps);
  report.order_l2p = compute_order(l2p, steps);
  if (!report.floor) {
    return;
  }
  const ErrorReport& f = report.floor->errors;
  report.subtracted = report.rows;
  energy.clear();
  l2u.clear();
  l2p.clear();
  for (StudyRow& r : report.subtracted) {
    r.errors.energy = remove_floor(r.errors.energy, f.energy);
    r.errors.l2_velocity_proj = remove_floor(r.errors.l2_velocity_proj, f.l2_velocity_proj);
    r.errors.l2_pressure_proj = remove_floor(r.errors.l2_pressure_proj, f.l2_pressure_proj);
    energy.push_back(r.errors.energy);
    l2u.push_back(r.errors.l2_velocity_proj);
    l2p.push_back(r.errors.l2_pressure_proj);
  }
  report.subtracted_order_energy = compute_order(energy, steps);
  report.subtracted_order_l2u = compute_order(l2u, steps);
  report.subtracted_order_l2p = compute_order(l2p, steps);
}

void run_cells(const StudyConfig& config, ConvergenceReport& report)
{
  config.validate();
  const Problem problem = manufactured_problem(config.problem, config.space.mu, config.space.rho);
  report.config = config;
  report.time_study = config.tau_rule.kind == TauRule::Kind::list && config.meshes.size() == 1;
  report.orders_suppressed = config.problem == "stokes_patch";
  const double final_time = config.final_time > 0.0 ? config.final_time : problem.final_time;

  SolveOptions options;
  options.assembly.workers = config.workers;
  options.allow_incompatible = config.allow_incompatible;

  auto run = [&](const Cell& cell) {
    const auto start = Clock::now();
    const Mesh mesh = build_uniform_triangulation(static_cast<std::size_t>(cell.cells), config.diagonal);
    StudyRow row;
    row.cells = cell.cells;
    row.h = 1.0 / cell.cells;
    row.tau = cell.tau;
    DiscreteSolution solution;
    if (problem.steady) {
      solution = solve_steady(mesh, config.space, problem, options);
      row.max_incompressibility = solution.incompressibility_residual;
    } else {
      const TimeGrid grid = TimeGrid::from_step_size(final_time, cell.tau);
      row.steps = grid.steps;
      double worst = 0.0;
      solution = solve_evolutionary(mesh, config.space, problem, grid, options,
                                    [&](std::size_t, const DiscreteSolution& s) {
                                      worst = std::max(worst, s.incompressibility_residual);
                                    });
      row.max_incompressibility = worst;
    }
    row.errors = evaluate_errors(mesh, config.space, solution, problem, config.pressure_gauge);
    row.errors.tau = cell.tau;
    row.seconds = seconds_since(start);
    return row;
  };
  for (const Cell& cell : study_cells(config)) {
    report.rows.push_back(run(cell));
  }
  if (config.floor_tau > 0.0) {
    report.floor = run({config.meshes.front(), config.floor_tau});
  }
}

} // namespace

ConvergenceReport compute_convergence_study(const StudyConfig& config)
{
  const auto start = Clock::now();
  ConvergenceReport report;
  run_cells(config, report);
  finish_orders(report);
  report.seconds = seconds_since(start);
  return report;
}

void write_reports(const ConvergenceReport& report)
{
  const auto& dir = report.config.out_dir;
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot write " + (dir / name).string());
    }
    out << text;
  };
  if (report.config.format != ReportFormat::md) {
    write("study.csv", report.csv());
  }
  if (report.config.format != ReportFormat::csv) {
    write("study.md", report.markdown());
  }
  if (report.floor && report.config.format != ReportFormat::md) {
    write("study_floor.csv", report.subtracted_csv());
  }
  write("study_meta.json", report.metadata_json());
}

ConvergenceReport run_convergence_study(const StudyConfig& config)
{
  config.validate();
  const auto start = Clock::now();
  ConvergenceReport report;
  try {
    run_cells(config, report);
  } catch (...) {
    report.config = config;
    finish_orders(report);
    report.seconds = seconds_since(start);
    write_reports(report);
    throw;
  }
  finish_orders(report);
  report.seconds = seconds_since(start);
  write_reports(report);
  return report;
}

} // namespace gwg
