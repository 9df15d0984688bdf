#include "gwg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

namespace gwg
{

PressureGauge parse_pressure_gauge(const std::string& name)
{
  if (name == "zero-mean") return PressureGauge::zero_mean;
  if (name == "first-element") return PressureGauge::first_element;
  throw std::invalid_argument("unknown pressure gauge '" + name + "' (expected zero-mean or first-element)");
}

std::string pressure_gauge_name(PressureGauge gauge)
{
  return gauge == PressureGauge::zero_mean ? "zero-mean" : "first-element";
}

PressureField gauge_pressure(const Mesh& mesh, const SpaceConfig& config, const PressureField& p_h,
                             const ScalarFn& p_exact, PressureGauge gauge)
{
  if (gauge == PressureGauge::zero_mean || mesh.n_elements() == 0) {
    return p_h;
  }
  // The first scaled monomial is the constant 1, so adding c to its
  // coefficient on every element shifts the field by c.
  const DofMap dofs(mesh, config);
  const LocalElement el(mesh, 0, config);
  Eigen::VectorXd integrals = Eigen::VectorXd::Zero(dofs.dim_pressure());
  for (std::size_t q = 0; q < el.n_quad(); ++q) {
    integrals += el.quad_weight(q) * el.pressure_values().row(static_cast<Eigen::Index>(q)).transpose();
  }
  const Eigen::VectorXd target = project_interior(p_exact, mesh, 0, config.n, config.effective_quadrature_order());
  const double shift = integrals.dot(target - p_h.local(dofs, 0)) / mesh.element_area(0);
  PressureField out = p_h;
  for (std::size_t t = 0; t < mesh.n_elements(); ++t) {
    out.coefficients[static_cast<Eigen::Index>(t) * dofs.dim_pressure()] += shift;
  }
  return out;
}

double energy_norm(const Mesh& mesh, const SpaceConfig& config, const WeakVelocity& v)
{
  const DofMap dofs(mesh, config);
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.n_elements(); ++t) {
    const LocalElement el(mesh, t, config);
    const Eigen::VectorXd local = v.local(dofs, t);
    for (std::size_t q = 0; q < el.n_quad(); ++q) {
      sum += el.quad_weight(q) * (el.weak_gradient_at(q) * local).squaredNorm();
    }
    const int dj = el.layout().dim_trace;
    double stab = 0.0;
    for (int le = 0; le < 3; ++le) {
      const Eigen::VectorXd mis = el.trace_mismatch(le) * local;
      for (int i = 0; i < 2; ++i) {
        for (int a = 0; a < dj; ++a) {
          stab += el.edge(le).length / (2.0 * a + 1.0) * mis[i * dj + a] * mis[i * dj + a];
        }
      }
    }
    sum += config.zeta * std::pow(el.diameter(), config.gamma) * stab;
  }
  return std::sqrt(sum);
}

double error_energy(const Mesh& mesh, const SpaceConfig& config, const WeakVelocity& u_h, const VectorFn& u_exact)
{
  WeakVelocity e = interpolate_weak(u_exact, mesh, config);
  e.coefficients -= u_h.coefficients;
  return energy_norm(mesh, config, e);
}

double error_l2(const Mesh& mesh, const SpaceConfig& config, const WeakVelocity& u_h, const VectorFn& u_exact,
                L2Mode mode)
{
  const DofMap dofs(mesh, config);
  const int order = config.effective_quadrature_order();
  const QuadRule& rule = triangle_quadrature(order);
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.n_elements(); ++t) {
    const ScaledMonomialBasis basis = element_basis(mesh, t, config.k);
    Eigen::MatrixX2d coef = u_h.interior(dofs, t);
    if (mode == L2Mode::vs_projection) {
      coef -= project_interior(u_exact, mesh, t, config.k, order);
    }
    const double jac = 2.0 * mesh.element_area(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = map_to_element(mesh, t, rule.points[q]);
      Eigen::Vector2d diff = coef.transpose() * basis.values(x);
      if (mode == L2Mode::vs_exact) {
        diff -= u_exact(x);
      }
      sum += jac * rule.weights[q] * diff.squaredNorm();
    }
  }
  return std::sqrt(sum);
}

double error_l2(const Mesh& mesh, const SpaceConfig& config, const PressureField& p_h, const ScalarFn& p_exact,
                L2Mode mode)
{
  const DofMap dofs(mesh, config);
  const int order = config.effective_quadrature_order();
  const QuadRule& rule = triangle_quadrature(order);
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.n_elements(); ++t) {
    const ScaledMonomialBasis basis = element_basis(mesh, t, config.n);
    Eigen::VectorXd coef = p_h.local(dofs, t);
    if (mode == L2Mode::vs_projection) {
      coef -= project_interior(p_exact, mesh, t, config.n, order);
    }
    const double jac = 2.0 * mesh.element_area(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = map_to_element(mesh, t, rule.points[q]);
      double diff = coef.dot(basis.values(x));
      if (mode == L2Mode::vs_exact) {
        diff -= p_exact(x);
      }
      sum += jac * rule.weights[q] * diff * diff;
    }
  }
  return std::sqrt(sum);
}

ErrorReport evaluate_errors(const Mesh& mesh, const SpaceConfig& config, const DiscreteSolution& solution,
                            const Problem& problem, PressureGauge gauge)
{
  const VectorFn u = problem.velocity_at(solution.time);
  const ScalarFn p = problem.pressure_at(solution.time);
  ErrorReport r;
  r.energy = error_energy(mesh, config, solution.velocity, u);
  r.l2_velocity_proj = error_l2(mesh, config, solution.velocity, u, L2Mode::vs_projection);
  r.l2_velocity_true = error_l2(mesh, config, solution.velocity, u, L2Mode::vs_exact);
  r.l2_pressure_zero_mean = error_l2(mesh, config, solution.pressure, p, L2Mode::vs_projection);
  const PressureField gauged = gauge_pressure(mesh, config, solution.pressure, p, gauge);
  r.l2_pressure_proj = error_l2(mesh, config, gauged, p, L2Mode::vs_projection);
  r.l2_pressure_true = error_l2(mesh, config, gauged, p, L2Mode::vs_exact);
  r.h = mesh.nominal_h();
  return r;
}

WeakIdentityReport check_weak_identities(const Mesh& mesh, const SpaceConfig& config, std::size_t trials,
                                         std::uint64_t seed, const WeakIdentityOptions& options)
{
  config.validate_parameters();
  const int s = std::min(config.j, config.l);
  const int order = config.effective_quadrature_order();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  auto random_matrix = [&](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) {
        m(r, c) = uniform(rng);
      }
    }
    return m;
  };

  WeakIdentityReport report;
  report.trials = trials;
  report.tolerance = options.tolerance;

  std::vector<LocalElement> elements;
  elements.reserve(mesh.n_elements());
  for (std::size_t t = 0; t < mesh.n_elements(); ++t) {
    elements.emplace_back(mesh, t, config);
  }

  for (std::size_t trial = 0; trial < trials; ++trial) {
    for (const LocalElement& el : elements) {
      const std::size_t t = el.index();
      const LocalLayout& layout = el.layout();
      const ScaledMonomialBasis phi_basis(mesh.centroid(t), el.diameter(), s);
      const ScaledMonomialBasis w_basis(mesh.centroid(t), el.diameter(), config.k + 1);
      // Tensor test function phi: row c = 2 i + q holds the P_s coefficients of phi_iq.
      const Eigen::MatrixXd phi = random_matrix(4, phi_basis.size());
      const Eigen::VectorXd v = random_matrix(layout.size(), 1);
      Eigen::MatrixX2d w_coef = random_matrix(w_basis.size(), 2);
      if (options.constant_w) {
        w_coef.bottomRows(w_coef.rows() - 1).setZero();
      }
      const VectorFn w = [&](const Point& x) -> Eigen::Vector2d { return w_coef.transpose() * w_basis.values(x); };

      // Q_h w in local layout.
      Eigen::VectorXd qw(layout.size());
      const Eigen::MatrixX2d w0 = project_interior(w, mesh, t, config.k, order);
      for (int i = 0; i < 2; ++i) {
        qw.segment(layout.interior(i, 0), layout.dim_interior) = w0.col(i);
      }
      for (int le = 0; le < 3; ++le) {
        const Eigen::MatrixX2d wb = project_edge(w, mesh, el.edge(le).edge, config.j, order);
        for (int i = 0; i < 2; ++i) {
          qw.segment(layout.trace(le, i, 0), layout.dim_trace) = wb.col(i);
        }
      }

      auto weak_gradient = [&](std::size_t q, const Eigen::VectorXd& dofs) -> Eigen::Vector4d {
        Eigen::Vector4d g = el.weak_gradient_at(q) * dofs;
        if (options.flip_correction_sign) {
          const Eigen::MatrixX2d grad = el.velocity_basis().gradients(el.quad_point(q));
          Eigen::Vector4d exact;
          for (int i = 0; i < 2; ++i) {
            const Eigen::VectorXd ci = dofs.segment(layout.interior(i, 0), layout.dim_interior);
            for (int qd = 0; qd < 2; ++qd) {
              exact[2 * i + qd] = grad.col(qd).dot(ci);
            }
          }
          g = 2.0 * exact - g;
        }
        return g;
      };
      auto phi_at = [&](const Point& x) -> Eigen::Vector4d { return phi * phi_basis.values(x); };
      auto div_phi_at = [&](const Point& x) -> Eigen::Vector2d {
        const Eigen::MatrixX2d g = phi_basis.gradients(x);
        Eigen::Vector2d d;
        for (int i = 0; i < 2; ++i) {
          d[i] = phi.row(2 * i).dot(g.col(0)) + phi.row(2 * i + 1).dot(g.col(1));
        }
        return d;
      };
      auto v0_at = [&](const Eigen::VectorXd& dofs, const Point& x) -> Eigen::Vector2d {
        const Eigen::VectorXd b = el.velocity_basis().values(x);
        return {b.dot(dofs.segment(layout.interior(0, 0), layout.dim_interior)),
                b.dot(dofs.segment(layout.interior(1, 0), layout.dim_interior))};
      };

      double lhs1 = 0.0, rhs1 = 0.0, lhs2 = 0.0, rhs2 = 0.0;
      for (std::size_t q = 0; q < el.n_quad(); ++q) {
        const Point& x = el.quad_point(q);
        const double wq = el.quad_weight(q);
        const Eigen::Vector4d ph = phi_at(x);
        const Eigen::Vector2d dph = div_phi_at(x);
        lhs1 += wq * weak_gradient(q, v).dot(ph);
        rhs1 -= wq * v0_at(v, x).dot(dph);

        lhs2 += wq * weak_gradient(q, qw).dot(ph);
        const Eigen::MatrixX2d wg = w_basis.gradients(x);
        Eigen::Vector4d grad_w;
        for (int i = 0; i < 2; ++i) {
          grad_w[2 * i] = w_coef.col(i).dot(wg.col(0));
          grad_w[2 * i + 1] = w_coef.col(i).dot(wg.col(1));
        }
        rhs2 += wq * (grad_w.dot(ph) + (w(x) - v0_at(qw, x)).dot(dph));
      }
      for (int le = 0; le < 3; ++le) {
        const auto& ed = el.edge(le);
        for (std::size_t q = 0; q < ed.points.size(); ++q) {
          const Eigen::VectorXd L = edge_basis_values(config.j, ed.parameters[q]);
          const Eigen::Vector4d ph = phi_at(ed.points[q]);
          for (int i = 0; i < 2; ++i) {
            const double vb = L.dot(v.segment(layout.trace(le, i, 0), layout.dim_trace));
            rhs1 += ed.weights[q] * vb * (ph[2 * i] * ed.normal[0] + ph[2 * i + 1] * ed.normal[1]);
          }
        }
      }
      const double r1 = std::abs(lhs1 - rhs1);
      const double r2 = std::abs(lhs2 - rhs2);
      report.max_residual_identity1 = std::max(report.max_residual_identity1, r1);
      report.max_residual_identity2 = std::max(report.max_residual_identity2, r2);
      if (!(r1 <= options.tolerance) || !(r2 <= options.tolerance)) {
        std::ostringstream os;
        os << "trial " << trial << " element " << t << ": residuals " << r1 << ", " << r2;
        report.failures.push_back(os.str());
      }
    }
  }
  return report;
}

namespace
{

// Extreme Ritz value of a symmetric operator by Lanczos with full
// reorthogonalization. `deflate`, when non-empty, is a unit vector kept out
// of the Krylov space.
double lanczos_extreme(Eigen::Index n, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                       bool largest, const Eigen::VectorXd& deflate = {}, int max_iterations = 400,
                       double tolerance = 1e-10)
{
  const int m_max = static_cast<int>(std::min<Eigen::Index>(n, max_iterations));
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Eigen::VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) q[i] = uniform(rng);
  auto orthogonalize = [&](Eigen::VectorXd& x, const Eigen::MatrixXd& basis, int cols) {
    for (int pass = 0; pass < 2; ++pass) {
      if (deflate.size() == n) x -= deflate.dot(x) * deflate;
      if (cols > 0) x -= basis.leftCols(cols) * (basis.leftCols(cols).transpose() * x);
    }
  };
  Eigen::MatrixXd basis(n, m_max);
  orthogonalize(q, basis, 0);
  q.normalize();
  std::vector<double> alpha, beta;
  double theta = 0.0;
  for (int j = 0; j < m_max; ++j) {
    basis.col(j) = q;
    Eigen::VectorXd r = apply(q);
    alpha.push_back(q.dot(r));
    orthogonalize(r, basis, j + 1);
    const double b = r.norm();
    Eigen::VectorXd a_diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), j + 1);
    Eigen::VectorXd b_sub = beta.empty() ? Eigen::VectorXd() : Eigen::Map<Eigen::VectorXd>(beta.data(), j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(a_diag, b_sub, Eigen::ComputeEigenvectors);
    const Eigen::Index pick = largest ? j : 0;
    theta = tri.eigenvalues()[pick];
    const double estimate = std::abs(b * tri.eigenvectors()(j, pick));
    if (estimate <= tolerance * std::max(1e-300, std::abs(theta)) || b < 1e-300) {
      break;
    }
    beta.push_back(b);
    q = r / b;
  }
  return theta;
}

SparseMatrix pressure_mass(const Mesh& mesh, const SpaceConfig& config)
{
  const int dn = poly_dim(config.n);
  std::vector<Triplet> triplets;
  for (std::size_t t = 0; t < mesh.n_elements(); ++t) {
    const LocalElement el(mesh, t, config);
    const Eigen::MatrixXd m = el.mass_matrix(el.pressure_basis());
    const auto off = static_cast<Eigen::Index>(t) * dn;
    for (int c = 0; c < dn; ++c) {
      for (int r = 0; r < dn; ++r) {
        triplets.emplace_back(off + r, off + c, m(r, c));
      }
    }
  }
  SparseMatrix mp(static_cast<Eigen::Index>(mesh.n_elements()) * dn, static_cast<Eigen::Index>(mesh.n_elements()) * dn);
  mp.setFromTriplets(triplets.begin(), triplets.end());
  return mp;
}

std::vector<Eigen::Index> zero_trace_dofs(const DofMap& dofs)
{
  std::vector<Eigen::Index> keep;
  const auto& boundary = dofs.boundary_dofs();
  std::size_t b = 0;
  for (Eigen::Index i = 0; i < dofs.n_velocity(); ++i) {
    if (b < boundary.size() && boundary[b] == i) {
      ++b;
      continue;
    }
    keep.push_back(i);
  }
  return keep;
}

SparseMatrix select_columns(const SparseMatrix& m, const std::vector<Eigen::Index>& cols)
{
  std::vector<Triplet> triplets;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (SparseMatrix::InnerIterator it(m, cols[c]); it; ++it) {
      triplets.emplace_back(it.row(), static_cast<Eigen::Index>(c), it.value());
    }
  }
  SparseMatrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

} // namespace

double smallest_eigenvalue(const SparseMatrix& symmetric, Eigen::Index dense_limit)
{
  const Eigen::Index n = symmetric.rows();
  if (n == 0) {
    throw std::invalid_argument("smallest_eigenvalue: empty matrix");
  }
  if (n <= dense_limit) {
    const Eigen::MatrixXd dense(symmetric);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("smallest_eigenvalue: dense eigen-solve failed");
    }
    return solver.eigenvalues()[0];
  }
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(symmetric);
  if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) {
    const double theta = lanczos_extreme(n, [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(ldlt.solve(x)); }, true);
    return 1.0 / theta;
  }
  return lanczos_extreme(n, [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(symmetric * x); }, false);
}

SparseMatrix restrict_to_zero_trace(const SparseMatrix& velocity_matrix, const DofMap& dofs)
{
  const std::vector<Eigen::Index> keep = zero_trace_dofs(dofs);
  const SparseMatrix cols = select_columns(velocity_matrix, keep);
  const SparseMatrix transposed = cols.transpose();
  return SparseMatrix(select_columns(transposed, keep).transpose());
}

double energy_kernel_eigenvalue(const Mesh& mesh, const SpaceConfig& config, const AssemblyOptions& options)
{
  SpaceConfig unit = config;
  unit.mu = 1.0;
  const DofMap dofs(mesh, unit);
  const SparseMatrix energy =
    assemble_bilinear(Form::viscous, mesh, unit, nullptr, options) + assemble_bilinear(Form::s1, mesh, unit, nullptr, options);
  return smallest_eigenvalue(restrict_to_zero_trace(energy, dofs));
}

double estimate_infsup(const Mesh& mesh, const SpaceConfig& config, const AssemblyOptions& options)
{
  SpaceConfig unit = config;
  unit.mu = 1.0;
  const DofMap dofs(mesh, unit);
  const std::vector<Eigen::Index> keep = zero_trace_dofs(dofs);
  const SparseMatrix energy = restrict_to_zero_trace(
    assemble_bilinear(Form::viscous, mesh, unit, nullptr, options) + assemble_bilinear(Form::s1, mesh, unit, nullptr, options),
    dofs);
  const SparseMatrix b = select_columns(assemble_bilinear(Form::divergence, mesh, unit, nullptr, options), keep);
  const SparseMatrix mp = pressure_mass(mesh, unit);
  const Eigen::Index np = mp.rows();

  Eigen::SimplicialLLT<SparseMatrix> energy_llt(energy);
  if (energy_llt.info() != Eigen::Success) {
    throw std::runtime_error("estimate_infsup: energy matrix factorization failed");
  }
  // Constant pressure in coefficient space: the first basis function is 1 on every element.
  Eigen::VectorXd one = Eigen::VectorXd::Zero(np);
  for (std::size_t t = 0; t < mesh.n_elements(); ++t) {
    one[static_cast<Eigen::Index>(t) * dofs.dim_pressure()] = 1.0;
  }

  if (np <= 5000) {
    const Eigen::MatrixXd bt = Eigen::MatrixXd(b.transpose());
    const Eigen::MatrixXd x = energy_llt.solve(bt);
    Eigen::MatrixXd schur = b * x;
    schur = 0.5 * (schur + schur.transpose()).eval();
    const Eigen::MatrixXd mass(mp);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(schur, mass, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("estimate_infsup: generalized eigen-solve failed");
    }
    // Constants are an exact null direction; the next eigenvalue belongs to their complement.
    return std::sqrt(std::max(0.0, solver.eigenvalues()[1]));
  }

  Eigen::SimplicialLLT<SparseMatrix> mass_llt(mp);
  const SparseMatrix lower = mass_llt.matrixL();
  const SparseMatrix upper = mass_llt.matrixU();
  const Eigen::PermutationMatrix<Eigen::Dynamic> perm = mass_llt.permutationP();
  // z = L^T P one spans the constants in the symmetrized coordinates.
  Eigen::VectorXd z = upper * (perm * one);
  z.normalize();
  auto apply = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    const Eigen::VectorXd u = perm.transpose() * Eigen::VectorXd(upper.triangularView<Eigen::Upper>().solve(y));
    const Eigen::VectorXd s = b * Eigen::VectorXd(energy_llt.solve(Eigen::VectorXd(b.transpose() * u)));
    return lower.triangularView<Eigen::Lower>().solve(Eigen::VectorXd(perm * s));
  };
  const double lambda = lanczos_extreme(np, apply, false, z);
  return std::sqrt(std::max(0.0, lambda));
}

double estimate_coercivity(const Mesh& mesh, const SpaceConfig& config, const VectorFn& beta,
                           const AssemblyOptions& options)
{
  const DofMap dofs(mesh, config);
  const SparseMatrix a = assemble_bilinear(Form::viscous, mesh, config, nullptr, options) +
                         assemble_bilinear(Form::convection, mesh, config, &beta, options) +
                         assemble_bilinear(Form::s1, mesh, config, nullptr, options);
  const SparseMatrix restricted = restrict_to_zero_trace(a, dofs);
  const SparseMatrix sym = 0.5 * (restricted + SparseMatrix(restricted.transpose()));
  const double scale = sym.diagonal().maxCoeff();
  return smallest_eigenvalue(sym) / scale;
}

} // namespace gwg
