// Convergence studies over a sequence of meshes and/or time steps, with CSV
// and Markdown report emission.

#ifndef GWG_STUDY_HPP
#define GWG_STUDY_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gwg/mesh.hpp"
#include "gwg/solver.hpp"
#include "gwg/space_config.hpp"
#include "gwg/verify.hpp"

namespace gwg
{

/// How the time step of each study cell is chosen.
///   none       steady problems
///   h2         tau = h^2 for each mesh
///   fixed:v    tau = v for every mesh
///   list:a,b   one cell per tau on a single mesh (a time-order study), or
///              paired with the mesh list when the lengths agree
struct TauRule
{
  enum class Kind
  {
    none,
    h2,
    fixed,
    list
  };
  Kind kind = Kind::none;
  std::vector<double> values;

  static TauRule parse(const std::string& text);
  std::string to_string() const;
};

enum class ReportFormat
{
  csv,
  md,
  both
};

ReportFormat parse_format(const std::string& text);

struct StudyConfig
{
  std::string problem = "steady_oseen_ex1";
  SpaceConfig space;
  bool allow_incompatible = false;
  /// Cells per side of each mesh, so h = 1/N; strictly increasing.
  std::vector<int> meshes{8, 16, 32, 64};
  Diagonal diagonal = Diagonal::rising;
  PressureGauge pressure_gauge = PressureGauge::zero_mean;
  TauRule tau_rule;
  /// Final time; 0 selects the problem's own.
  double final_time = 0.0;
  std::filesystem::path out_dir = "study_out";
  ReportFormat format = ReportFormat::both;
  int workers = 1;
  /// Time studies only: when positive, one extra run at this step gives the
  /// spatial error floor, which is removed in quadrature, sqrt(e^2 - e_floor^2),
  /// for a second report with its own orders.
  double floor_tau = 0.0;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

/// Reads a JSON object with any of the keys problem, elements, gamma, alpha,
/// zeta, sigma, mu, rho, mesh, diagonal, pressure_gauge, tau_rule, tfinal,
/// out, format, workers, allow_incompatible, floor_tau. Keys not present keep the values of `base`.
StudyConfig load_study_config(const std::filesystem::path& file, StudyConfig base = {});

struct StudyRow
{
  int cells = 0;
  double h = 0.0;
  double tau = 0.0;
  std::size_t steps = 0;
  ErrorReport errors;
  /// Largest discrete continuity residual over every solve of the cell.
  double max_incompressibility = 0.0;
  double seconds = 0.0;
};

struct ConvergenceReport
{
  StudyConfig config;
  bool time_study = false;
  bool orders_suppressed = false;
  std::vector<StudyRow> rows;
  /// Orders per norm; empty optional where undefined (first row, nonpositive errors, suppressed).
  std::vector<std::optional<double>> order_energy, order_l2u, order_l2p;
  /// Floor run and the rows with the floor removed; set when config.floor_tau > 0.
  std::optional<StudyRow> floor;
  std::vector<StudyRow> subtracted;
  std::vector<std::optional<double>> subtracted_order_energy, subtracted_order_l2u, subtracted_order_l2p;
  double seconds = 0.0;

  std::string csv() const;
  /// Same layout as csv(), for the floor-removed rows.
  std::string subtracted_csv() const;
  std::string markdown() const;
  std::string metadata_json() const;
};

/// order_i = ln(e_{i-1}/e_i) / ln(s_{i-1}/s_i); the first entry and any pair
/// with a nonpositive error are undefined.
std::vector<std::optional<double>> compute_order(const std::vector<double>& errors, const std::vector<double>& steps);

/// Number formatting shared by all reports.
std::string format_error(double value);
std::string format_order(const std::optional<double>& value);

/// sqrt(error^2 - floor^2), or 0 when the floor is not below the error.
double remove_floor(double error, double floor);

/// Runs every cell in order and writes the reports into config.out_dir. On a
/// solver failure the completed rows are written before the exception is
/// rethrown.
ConvergenceReport run_convergence_study(const StudyConfig& config);

/// Same, without touching the file system.
ConvergenceReport compute_convergence_study(const StudyConfig& config);

void write_reports(const ConvergenceReport& report);

} // namespace gwg

#endif
