#include "gwg/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

namespace gwg
{

struct SparseDirectSolver::Impl
{
  SparseMatrix matrix; // full system, for residuals
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  bool ready = false;

  // Condensed leading block; unused when `condensed` is zero.
  Eigen::Index condensed = 0;
  SparseMatrix block_inverse, upper, lower; // A_II^-1, A_IR, A_RI

  // Border data of the factored core; unused when `bordered` is false.
  bool bordered = false;
  Eigen::Index pin = 0;
  double shift = 0.0;
  Eigen::VectorXd column, row; // c and r
  double corner = 0.0;         // d
  Eigen::VectorXd solved_pin, solved_column;
  Eigen::Matrix2d coupling;

  void reset()
  {
    ready = false;
    condensed = 0;
    bordered = false;
  }

  void factor(const SparseMatrix& k)
  {
    lu.compute(k);
    if (lu.info() != Eigen::Success) {
      std::ostringstream os;
      os << "factorize: sparse LU failed on a " << k.rows() << "x" << k.cols() << " system with " << k.nonZeros()
         << " nonzeros: " << lu.lastErrorMessage();
      throw LinearSolveError(os.str());
    }
  }

  // Schur complement of the leading block-diagonal part of `m`.
  SparseMatrix condense(const SparseMatrix& m, const Condensation& c)
  {
    condensed = c.size;
    if (c.size == 0) {
      return m;
    }
    const Eigen::Index ni = c.size;
    const Eigen::Index nr = m.rows() - ni;
    if (c.block <= 0 || ni % c.block != 0 || nr <= 0) {
      throw LinearSolveError("factorize: condensed block does not fit the matrix");
    }
    const SparseMatrix leading = m.topLeftCorner(ni, ni);
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(ni * c.block));
    for (Eigen::Index b0 = 0; b0 < ni; b0 += c.block) {
      Eigen::MatrixXd blk = Eigen::MatrixXd::Zero(c.block, c.block);
      for (Eigen::Index j = b0; j < b0 + c.block; ++j) {
        for (SparseMatrix::InnerIterator it(leading, j); it; ++it) {
          if (it.row() < b0 || it.row() >= b0 + c.block) {
            throw LinearSolveError("factorize: condensed part is not block diagonal");
          }
          blk(it.row() - b0, j - b0) = it.value();
        }
      }
      const Eigen::FullPivLU<Eigen::MatrixXd> local(blk);
      if (!local.isInvertible()) {
        throw LinearSolveError("factorize: singular block in the condensed part");
      }
      const Eigen::MatrixXd inv = local.inverse();
      for (Eigen::Index j = 0; j < c.block; ++j) {
        for (Eigen::Index i = 0; i < c.block; ++i) {
          triplets.emplace_back(b0 + i, b0 + j, inv(i, j));
        }
      }
    }
    block_inverse.resize(ni, ni);
    block_inverse.setFromTriplets(triplets.begin(), triplets.end());
    upper = m.topRightCorner(ni, nr);
    lower = m.bottomLeftCorner(nr, ni);
    SparseMatrix schur = SparseMatrix(m.bottomRightCorner(nr, nr)) - lower * (block_inverse * upper);
    schur.prune(0.0);
    schur.makeCompressed();
    return schur;
  }

  void factor_bordered(const SparseMatrix& matrix, Eigen::Index core_pin)
  {
    const Eigen::Index n = matrix.rows() - 1;
    bordered = true;
    pin = core_pin;
    SparseMatrix k = matrix.topLeftCorner(n, n);
    column = Eigen::VectorXd(matrix.col(n)).head(n);
    const SparseMatrix transposed = matrix.transpose();
    row = Eigen::VectorXd(transposed.col(n)).head(n);
    corner = matrix.coeff(n, n);
    // Shift of the size of the pinned column so the modified block stays well scaled.
    double scale = 0.0;
    for (SparseMatrix::InnerIterator it(k, pin); it; ++it) {
      scale = std::max(scale, std::abs(it.value()));
    }
    shift = scale > 0.0 ? scale : 1.0;
    k.coeffRef(pin, pin) += shift;
    k.makeCompressed();
    factor(k);

    solved_pin = lu.solve(Eigen::VectorXd::Unit(n, pin));
    solved_column = lu.solve(column);
    // With x = base + s mu u_e - lambda u_c, the conditions x[pin] = mu and
    // r.x + d lambda = b_n read coupling * (mu, lambda) = (-base[pin], b_n - r.base).
    coupling << shift * solved_pin[pin] - 1.0, -solved_column[pin], shift * row.dot(solved_pin),
      corner - row.dot(solved_column);
  }

  Eigen::VectorXd apply_core(const Eigen::VectorXd& rhs) const
  {
    if (!bordered) {
      return lu.solve(rhs);
    }
    const Eigen::Index n = rhs.size() - 1;
    const Eigen::VectorXd base = lu.solve(rhs.head(n));
    // Unknowns mu = x[pin] and lambda = x[n].
    Eigen::Vector2d g(-base[pin], rhs[n] - row.dot(base));
    const Eigen::Vector2d ml = coupling.partialPivLu().solve(g);
    Eigen::VectorXd x(n + 1);
    x.head(n) = base + shift * ml[0] * solved_pin - ml[1] * solved_column;
    x[n] = ml[1];
    return x;
  }

  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& rhs) const
  {
    if (condensed == 0) {
      return apply_core(rhs);
    }
    const Eigen::Index nr = rhs.size() - condensed;
    const Eigen::VectorXd bi = rhs.head(condensed);
    const Eigen::VectorXd xr = apply_core(rhs.tail(nr) - lower * (block_inverse * bi));
    Eigen::VectorXd x(rhs.size());
    x.head(condensed) = block_inverse * (bi - upper * xr);
    x.tail(nr) = xr;
    return x;
  }
};

SparseDirectSolver::SparseDirectSolver(double residual_tolerance)
  : _impl(std::make_unique<Impl>()), _tolerance(residual_tolerance)
{
}

SparseDirectSolver::~SparseDirectSolver() = default;
SparseDirectSolver::SparseDirectSolver(SparseDirectSolver&&) noexcept = default;
SparseDirectSolver& SparseDirectSolver::operator=(SparseDirectSolver&&) noexcept = default;

void SparseDirectSolver::factorize(const SparseMatrix& matrix, const Condensation& condensation)
{
  if (matrix.rows() != matrix.cols()) {
    throw LinearSolveError("factorize: matrix is not square");
  }
  Impl& im = *_impl;
  im.reset();
  im.matrix = matrix;
  im.matrix.makeCompressed();
  im.factor(im.condense(im.matrix, condensation));
  im.ready = true;
}

void SparseDirectSolver::factorize_bordered(const SparseMatrix& matrix, Eigen::Index pin,
                                            const Condensation& condensation)
{
  if (matrix.rows() != matrix.cols() || matrix.rows() < 2) {
    throw LinearSolveError("factorize_bordered: matrix must be square with at least two rows");
  }
  const Eigen::Index n = matrix.rows() - 1;
  if (pin < condensation.size || pin >= n) {
    throw LinearSolveError("factorize_bordered: pin index out of range");
  }
  Impl& im = *_impl;
  im.reset();
  im.matrix = matrix;
  im.matrix.makeCompressed();
  // The border only touches the uncondensed unknowns, so condensing first keeps it intact.
  im.factor_bordered(im.condense(im.matrix, condensation), pin - condensation.size);
  im.ready = true;
}

bool SparseDirectSolver::factorized() const
{
  return _impl->ready;
}

Eigen::VectorXd SparseDirectSolver::solve(const Eigen::VectorXd& rhs) const
{
  if (!_impl->ready) {
    throw LinearSolveError("solve: no factorization available");
  }
  if (rhs.size() != _impl->matrix.rows()) {
    throw LinearSolveError("solve: right-hand side has the wrong length");
  }
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    _last_residual = 0.0;
    return Eigen::VectorXd::Zero(rhs.size());
  }
  Eigen::VectorXd x = _impl->apply_inverse(rhs);
  Eigen::VectorXd r = rhs - _impl->matrix * x;
  _last_residual = r.norm() / bnorm;
  for (int pass = 0; pass < 2 && _last_residual > _tolerance; ++pass) {
    x += _impl->apply_inverse(r);
    r = rhs - _impl->matrix * x;
    _last_residual = r.norm() / bnorm;
  }
  if (!(_last_residual <= _tolerance)) {
    std::ostringstream os;
    os << "solve: relative residual " << _last_residual << " exceeds " << _tolerance;
    throw LinearSolveError(os.str());
  }
  return x;
}

Eigen::Index pressure_pin(const SaddleSystem& system)
{
  if (!system.mean_constrained || system.n_pressure == 0) {
    throw LinearSolveError("pressure_pin: system carries no mean constraint");
  }
  const Eigen::Index p0 = system.reduced_matrix.rows() - 1 - system.n_pressure;
  const double largest = system.mean_row.cwiseAbs().maxCoeff();
  Eigen::Index best = system.n_pressure - 1;
  while (best > 0 && std::abs(system.mean_row[best]) < 0.5 * largest) {
    --best;
  }
  return p0 + best;
}

Condensation interior_condensation(const SaddleSystem& system)
{
  return {system.interior_unknowns, system.interior_block};
}

void factorize_system(SparseDirectSolver& solver, const SaddleSystem& system)
{
  if (system.free_dofs.empty()) {
    throw LinearSolveError("factorize_system: system has not been Dirichlet-reduced");
  }
  if (system.mean_constrained) {
    solver.factorize_bordered(system.reduced_matrix, pressure_pin(system), interior_condensation(system));
  } else {
    solver.factorize(system.reduced_matrix, interior_condensation(system));
  }
}

Eigen::VectorXd linear_solve(const SparseMatrix& matrix, const Eigen::VectorXd& rhs)
{
  SparseDirectSolver solver;
  solver.factorize(matrix);
  return solver.solve(rhs);
}

Eigen::VectorXd linear_solve(const SaddleSystem& system)
{
  SparseDirectSolver solver;
  factorize_system(solver, system);
  return solver.solve(system.reduced_rhs);
}

} // namespace gwg
