#ifndef GWG_SOLVER_HPP
#define GWG_SOLVER_HPP

#include <cstddef>
#include <functional>
#include <iosfwd>

#include <Eigen/Core>

#include "gwg/assembly.hpp"
#include "gwg/linear_solver.hpp"
#include "gwg/mesh.hpp"
#include "gwg/problems.hpp"
#include "gwg/space_config.hpp"

namespace gwg
{

struct DiscreteSolution
{
  WeakVelocity velocity;
  PressureField pressure;
  double time = 0.0;
  /// Zero-mean multiplier.
  double multiplier = 0.0;
  /// max |B U + S2 P + c l| of the discrete continuity equation.
  double incompressibility_residual = 0.0;
  /// Relative residual of the linear solve that produced this state.
  double solve_residual = 0.0;
};

/// Uniform time grid tau = final_time / steps.
struct TimeGrid
{
  double tau;
  std::size_t steps;
  double final_time;

  static constexpr std::size_t max_steps = 10'000'000;

  static TimeGrid from_steps(double final_time, std::size_t steps);
  /// Requires final_time / tau to be an integer up to rounding.
  static TimeGrid from_step_size(double final_time, double tau);
};

struct SolveOptions
{
  AssemblyOptions assembly;
  bool allow_incompatible = false;
  /// Evolutionary solves only: refactor the matrix every step instead of reusing it.
  bool refactor_each_step = false;
};

DiscreteSolution solve_steady(const Mesh& mesh, const SpaceConfig& config, const Problem& problem,
                              const SolveOptions& options = {});

/// Called after every accepted step with the step index (1-based) and state.
using StepObserver = std::function<void(std::size_t, const DiscreteSolution&)>;

/// Backward Euler from u^0 = Q_h u(., 0) to t = grid.final_time.
DiscreteSolution solve_evolutionary(const Mesh& mesh, const SpaceConfig& config, const Problem& problem,
                                    const TimeGrid& grid, const SolveOptions& options = {},
                                    const StepObserver& observer = {});

/// Backward Euler with the problem data frozen at t = 0 (the steady data), starting from u^0.
DiscreteSolution march_frozen(const Mesh& mesh, const SpaceConfig& config, const Problem& problem,
                              const WeakVelocity& initial, const TimeGrid& grid, const SolveOptions& options = {});

/// Writes per-element interior and per-edge trace coefficients plus pressures as CSV.
void write_solution(std::ostream& os, const Mesh& mesh, const SpaceConfig& config, const DiscreteSolution& solution);

} // namespace gwg

#endif
