#include "gwg/solver.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gwg
{

TimeGrid TimeGrid::from_steps(double final_time, std::size_t steps)
{
  if (!(final_time > 0.0)) {
    throw std::invalid_argument("TimeGrid: final time must be positive");
  }
  if (steps == 0 || steps > max_steps) {
    throw std::invalid_argument("TimeGrid: step count out of range");
  }
  return {final_time / static_cast<double>(steps), steps, final_time};
}

TimeGrid TimeGrid::from_step_size(double final_time, double tau)
{
  if (!(tau > 0.0) || !(final_time > 0.0)) {
    throw std::invalid_argument("TimeGrid: tau and final time must be positive");
  }
  const double ratio = final_time / tau;
  if (!(ratio <= static_cast<double>(max_steps))) {
    throw std::invalid_argument("TimeGrid: too many steps");
  }
  const double steps = std::round(ratio);
  if (steps < 1.0 || std::abs(steps - ratio) > 1e-9 * ratio) {
    std::ostringstream os;
    os << "TimeGrid: tau = " << tau << " does not divide the final time " << final_time;
    throw std::invalid_argument(os.str());
  }
  return from_steps(final_time, static_cast<std::size_t>(steps));
}

namespace
{

void check_problem(const SpaceConfig& config, const Problem& problem, const SolveOptions& options)
{
  config.validate(options.allow_incompatible);
  if (problem.mu != config.mu || problem.rho != config.rho) {
    throw std::invalid_argument("problem '" + problem.name + "' was built for different mu/rho than the configuration");
  }
}

// Assembled and factored system for one (mesh, config, mass scale).
class OseenOperator
{
public:
  OseenOperator(const Mesh& mesh, const SpaceConfig& config, const Problem& problem, double mass_scale,
                const AssemblyOptions& assembly)
    : _mesh(mesh), _config(config), _dofs(mesh, config), _assembly(assembly)
  {
    _blocks = assemble_blocks(mesh, config, problem.beta_field(), assembly);
    SaddleSystem system = make_saddle_system(_blocks, Eigen::VectorXd::Zero(_dofs.n_total()), mass_scale);
    system = apply_dirichlet(std::move(system), mesh, config, problem.velocity_at(0.0));
    _system = constrain_system(std::move(system), mesh, config);
    factorize();
  }

  void factorize() { factorize_system(_solver, _system); }

  const OseenBlocks& blocks() const { return _blocks; }
  const DofMap& dofs() const { return _dofs; }

  DiscreteSolution solve(const Eigen::VectorXd& full_rhs, const VectorFn& g, double time) const
  {
    const Eigen::VectorXd dvals = dirichlet_values(_mesh, _config, _dofs, g);
    const Eigen::VectorXd reduced = reduce_rhs(_system, full_rhs, dvals);
    const Eigen::VectorXd x = _solver.solve(reduced);
    const Eigen::VectorXd full = expand_solution(_system, x, &dvals);

    DiscreteSolution s;
    s.velocity.coefficients = full.head(_dofs.n_velocity());
    s.pressure.coefficients = full.tail(_dofs.n_pressure());
    s.time = time;
    s.multiplier = x[x.size() - 1];
    s.solve_residual = _solver.last_residual();
    const Eigen::VectorXd continuity = _blocks.divergence * s.velocity.coefficients +
                                       _blocks.s2 * s.pressure.coefficients + s.multiplier * _system.mean_row;
    s.incompressibility_residual = continuity.lpNorm<Eigen::Infinity>();
    return s;
  }

private:
  const Mesh& _mesh;
  SpaceConfig _config;
  DofMap _dofs;
  AssemblyOptions _assembly;
  OseenBlocks _blocks;
  SaddleSystem _system;
  SparseDirectSolver _solver;
};

} // namespace

DiscreteSolution solve_steady(const Mesh& mesh, const SpaceConfig& config, const Problem& problem,
                              const SolveOptions& options)
{
  check_problem(config, problem, options);
  const OseenOperator op(mesh, config, problem, 0.0, options.assembly);
  const Eigen::VectorXd load = assemble_load(mesh, config, problem.forcing_at(0.0), options.assembly);
  return op.solve(load, problem.velocity_at(0.0), 0.0);
}

namespace
{

DiscreteSolution march(const Mesh& mesh, const SpaceConfig& config, const Problem& problem,
                       const WeakVelocity& initial, const TimeGrid& grid, const SolveOptions& options,
                       const StepObserver& observer, bool frozen)
{
  if (grid.steps == 0 || grid.steps > TimeGrid::max_steps || !(grid.tau > 0.0)) {
    throw std::invalid_argument("time grid out of range");
  }
  OseenOperator op(mesh, config, problem, 1.0 / grid.tau, options.assembly);
  const Eigen::Index nv = op.dofs().n_velocity();
  if (initial.coefficients.size() != nv) {
    throw std::invalid_argument("initial velocity does not match the discretization");
  }

  DiscreteSolution state;
  state.velocity = initial;
  state.pressure.coefficients = Eigen::VectorXd::Zero(op.dofs().n_pressure());
  const LoadAssembler loads(mesh, config);
  Eigen::VectorXd frozen_load;
  if (frozen) {
    frozen_load = loads.assemble(problem.forcing_at(0.0));
  }
  for (std::size_t n = 0; n < grid.steps; ++n) {
    const double t = frozen ? 0.0 : static_cast<double>(n + 1) * grid.tau;
    Eigen::VectorXd rhs = frozen ? frozen_load : loads.assemble(problem.forcing_at(t));
    rhs.head(nv) += (op.blocks().mass * state.velocity.coefficients) / grid.tau;
    if (options.refactor_each_step && n > 0) {
      op.factorize();
    }
    state = op.solve(rhs, problem.velocity_at(t), static_cast<double>(n + 1) * grid.tau);
    if (observer) {
      observer(n + 1, state);
    }
  }
  state.time = grid.final_time;
  return state;
}

} // namespace

DiscreteSolution solve_evolutionary(const Mesh& mesh, const SpaceConfig& config, const Problem& problem,
                                    const TimeGrid& grid, const SolveOptions& options, const StepObserver& observer)
{
  check_problem(config, problem, options);
  const WeakVelocity initial = interpolate_weak(problem.velocity_at(0.0), mesh, config);
  return march(mesh, config, problem, initial, grid, options, observer, false);
}

DiscreteSolution march_frozen(const Mesh& mesh, const SpaceConfig& config, const Problem& problem,
                              const WeakVelocity& initial, const TimeGrid& grid, const SolveOptions& options)
{
  check_problem(config, problem, options);
  return march(mesh, config, problem, initial, grid, options, {}, true);
}

void write_solution(std::ostream& os, const Mesh& mesh, const SpaceConfig& config, const DiscreteSolution& solution)
{
  const DofMap dofs(mesh, config);
  const auto old_flags = os.flags();
  const auto old_precision = os.precision(17);
  os << std::scientific;
  os << "# time " << solution.time << '\n';
  os << "kind,index,component,basis,value\n";
  for (std::size_t t = 0; t < mesh.n_elements(); ++t) {
    const Eigen::MatrixX2d c = solution.velocity.interior(dofs, t);
    for (int i = 0; i < 2; ++i) {
      for (Eigen::Index b = 0; b < c.rows(); ++b) {
        os << "interior," << t << ',' << i << ',' << b << ',' << c(b, i) << '\n';
      }
    }
  }
  for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
    const Eigen::MatrixX2d c = solution.velocity.trace(dofs, e);
    for (int i = 0; i < 2; ++i) {
      for (Eigen::Index a = 0; a < c.rows(); ++a) {
        os << "trace," << e << ',' << i << ',' << a << ',' << c(a, i) << '\n';
      }
    }
  }
  for (std::size_t t = 0; t < mesh.n_elements(); ++t) {
    const Eigen::VectorXd p = solution.pressure.local(dofs, t);
    for (Eigen::Index r = 0; r < p.size(); ++r) {
      os << "pressure," << t << ",0," << r << ',' << p[r] << '\n';
    }
  }
  os.flags(old_flags);
  os.precision(old_precision);
}

} // namespace gwg
