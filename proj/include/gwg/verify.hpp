// Error norms against manufactured solutions and numerical checks of the
// structural properties of the discretization: energy-norm kernel, discrete
// inf-sup constant, coercivity of the Oseen block and the weak-gradient
// identities.

#ifndef GWG_VERIFY_HPP
#define GWG_VERIFY_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gwg/assembly.hpp"
#include "gwg/problems.hpp"
#include "gwg/solver.hpp"

namespace gwg
{

struct ErrorReport
{
  double energy = 0.0;            // |||Q_h u - u_h|||
  double l2_velocity_proj = 0.0;  // ||Q0 u - u0||
  double l2_velocity_true = 0.0;  // ||u - u0||
  double l2_pressure_proj = 0.0;  // ||Q_h^p p - p_h||
  double l2_pressure_true = 0.0;  // ||p - p_h||
  /// ||Q_h^p p - p_h|| for the zero-mean p_h, whatever gauge the two fields above use.
  double l2_pressure_zero_mean = 0.0;
  double h = 0.0;
  double tau = 0.0;
};

enum class L2Mode
{
  vs_projection,
  vs_exact
};

/// Representative of the discrete pressure (defined up to a constant) used
/// when measuring pressure errors.
///   zero_mean      p_h as solved, with zero mean over the domain
///   first_element  p_h shifted so that its mean over element 0 equals that of p
enum class PressureGauge
{
  zero_mean,
  first_element
};

PressureGauge parse_pressure_gauge(const std::string& name);
std::string pressure_gauge_name(PressureGauge gauge);

PressureField gauge_pressure(const Mesh& mesh, const SpaceConfig& config, const PressureField& p_h,
                             const ScalarFn& p_exact, PressureGauge gauge);

/// |||v|||^2 = (grad_w v, grad_w v) + s1(v, v).
double energy_norm(const Mesh& mesh, const SpaceConfig& config, const WeakVelocity& v);

double error_energy(const Mesh& mesh, const SpaceConfig& config, const WeakVelocity& u_h, const VectorFn& u_exact);

double error_l2(const Mesh& mesh, const SpaceConfig& config, const WeakVelocity& u_h, const VectorFn& u_exact,
                L2Mode mode);
double error_l2(const Mesh& mesh, const SpaceConfig& config, const PressureField& p_h, const ScalarFn& p_exact,
                L2Mode mode);

ErrorReport evaluate_errors(const Mesh& mesh, const SpaceConfig& config, const DiscreteSolution& solution,
                            const Problem& problem, PressureGauge gauge = PressureGauge::zero_mean);

struct WeakIdentityReport
{
  std::size_t trials = 0;
  double max_residual_identity1 = 0.0; // (grad_w v, phi) = -(v0, div phi) + <v_b, phi n>
  double max_residual_identity2 = 0.0; // (grad_w Q_h w, phi) = (grad w, phi) + ((I - Q0) w, div phi)
  double tolerance = 1e-11;
  std::vector<std::string> failures;

  double max_residual() const { return std::max(max_residual_identity1, max_residual_identity2); }
  bool passed() const { return failures.empty(); }
};

struct WeakIdentityOptions
{
  double tolerance = 1e-11;
  /// Negative control: evaluate grad v0 - delta_w instead of grad v0 + delta_w.
  bool flip_correction_sign = false;
  /// Restrict the random w to constants.
  bool constant_w = false;
};

/// Random trials of both weak-gradient identities for tensors in [P_s]^{2x2}, s = min(j, l).
WeakIdentityReport check_weak_identities(const Mesh& mesh, const SpaceConfig& config, std::size_t trials,
                                         std::uint64_t seed, const WeakIdentityOptions& options = {});

/// Smallest eigenvalue of a symmetric matrix: dense below `dense_limit`
/// unknowns, Lanczos (shift-invert when positive definite) above.
double smallest_eigenvalue(const SparseMatrix& symmetric, Eigen::Index dense_limit = 5000);

/// Restriction of a velocity-velocity matrix to interior (non-boundary) DOFs, i.e. V_h^0.
SparseMatrix restrict_to_zero_trace(const SparseMatrix& velocity_matrix, const DofMap& dofs);

/// Smallest eigenvalue of K + S1 on V_h^0.
double energy_kernel_eigenvalue(const Mesh& mesh, const SpaceConfig& config, const AssemblyOptions& options = {});

/// Discrete inf-sup constant min_q max_v b(v, q) / (|||v||| ||q||) over q orthogonal to constants.
double estimate_infsup(const Mesh& mesh, const SpaceConfig& config, const AssemblyOptions& options = {});

/// Smallest eigenvalue of the symmetric part of mu K + rho N + S1 on V_h^0, divided by its largest diagonal entry.
double estimate_coercivity(const Mesh& mesh, const SpaceConfig& config, const VectorFn& beta,
                           const AssemblyOptions& options = {});

} // namespace gwg

#endif
