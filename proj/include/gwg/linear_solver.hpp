#ifndef GWG_LINEAR_SOLVER_HPP
#define GWG_LINEAR_SOLVER_HPP

#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "gwg/assembly.hpp"

namespace gwg
{

class LinearSolveError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Leading unknowns whose diagonal block is block diagonal; they are
/// eliminated block by block before the sparse factorization.
struct Condensation
{
  Eigen::Index size = 0;
  Eigen::Index block = 0;
};

/// Sparse LU (COLAMD ordering) with a relative residual check on every solve.
class SparseDirectSolver
{
public:
  explicit SparseDirectSolver(double residual_tolerance = 1e-10);
  ~SparseDirectSolver();
  SparseDirectSolver(SparseDirectSolver&&) noexcept;
  SparseDirectSolver& operator=(SparseDirectSolver&&) noexcept;

  void factorize(const SparseMatrix& matrix, const Condensation& condensation = {});

  /// Same system, for matrices whose last row and column form a border
  /// [[K, c], [r^T, d]] around a block K that is singular by one rank (the
  /// zero-mean pressure constraint). K + s e_pin e_pin^T is factored instead,
  /// so the dense border never enters the sparse factors, and the bordered
  /// system is recovered exactly from two extra solves. The null vector of K
  /// must not vanish at `pin`.
  void factorize_bordered(const SparseMatrix& matrix, Eigen::Index pin, const Condensation& condensation = {});

  bool factorized() const;

  /// Solves with the stored factors, refining iteratively up to two times;
  /// throws LinearSolveError when ||Ax - b|| / ||b|| stays above tolerance.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  /// Relative residual of the last solve.
  double last_residual() const { return _last_residual; }

private:
  struct Impl;
  std::unique_ptr<Impl> _impl;
  double _tolerance;
  mutable double _last_residual = 0.0;
};

/// Reduced index of the pressure unknown used as pin in a mean-constrained
/// system: the last one among those with the largest integral, which are the
/// elementwise constants.
Eigen::Index pressure_pin(const SaddleSystem& system);

/// Condensation of the interior velocity unknowns of a reduced system.
Condensation interior_condensation(const SaddleSystem& system);

/// Factorizes a Dirichlet-reduced system, bordered when mean-constrained.
void factorize_system(SparseDirectSolver& solver, const SaddleSystem& system);

/// Factorizes and solves a constrained, Dirichlet-reduced system.
Eigen::VectorXd linear_solve(const SaddleSystem& system);

/// Factorizes and solves a plain sparse system.
Eigen::VectorXd linear_solve(const SparseMatrix& matrix, const Eigen::VectorXd& rhs);

} // namespace gwg

#endif
