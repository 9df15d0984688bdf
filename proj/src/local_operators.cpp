#include "gwg/local_operators.hpp"

#include <stdexcept>
#include <string>

#include <Eigen/LU>

namespace gwg
{

Eigen::MatrixXd solve_local_mass(const Eigen::MatrixXd& mass, const Eigen::MatrixXd& rhs)
{
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(mass);
  if (!(lu.rcond() > 1e-14)) {
    throw std::runtime_error("local mass matrix is singular (degenerate element geometry?)");
  }
  return lu.solve(rhs);
}

LocalElement::LocalElement(const Mesh& mesh, std::size_t t, const SpaceConfig& config)
  : _t(t),
    _config(config),
    _layout{poly_dim(config.k), edge_poly_dim(config.j)},
    _area(mesh.element_area(t)),
    _h(mesh.element_diameter(t)),
    _basis_k(element_basis(mesh, t, config.k)),
    _basis_l(element_basis(mesh, t, config.l)),
    _basis_m(element_basis(mesh, t, config.m)),
    _basis_n(element_basis(mesh, t, config.n))
{
  const int order = config.effective_quadrature_order();
  const QuadRule& tri = triangle_quadrature(order);
  const QuadRule& line = edge_quadrature(order);

  const std::size_t nq = tri.size();
  _points.reserve(nq);
  _weights.reserve(nq);
  _phi_k.resize(static_cast<Eigen::Index>(nq), _basis_k.size());
  _phi_l.resize(static_cast<Eigen::Index>(nq), _basis_l.size());
  _phi_m.resize(static_cast<Eigen::Index>(nq), _basis_m.size());
  _phi_n.resize(static_cast<Eigen::Index>(nq), _basis_n.size());
  _grad_k.reserve(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    const Point x = map_to_element(mesh, t, tri.points[q]);
    const auto r = static_cast<Eigen::Index>(q);
    _points.push_back(x);
    _weights.push_back(2.0 * _area * tri.weights[q]);
    _phi_k.row(r) = _basis_k.values(x).transpose();
    _phi_l.row(r) = _basis_l.values(x).transpose();
    _phi_m.row(r) = _basis_m.values(x).transpose();
    _phi_n.row(r) = _basis_n.values(x).transpose();
    _grad_k.push_back(_basis_k.gradients(x));
  }

  const int dk = _layout.dim_interior;
  const int dj = _layout.dim_trace;
  const int dl = _basis_l.size();
  const int dm = _basis_m.size();
  const int nloc = _layout.size();

  for (int le = 0; le < 3; ++le) {
    const std::size_t eid = mesh.element_edges(t)[le];
    const Edge& e = mesh.edges()[eid];
    EdgeData& ed = _edges[le];
    ed.edge = eid;
    ed.start = mesh.vertices()[e.vertices[0]];
    ed.end = mesh.vertices()[e.vertices[1]];
    ed.normal = mesh.outward_normal(t, le);
    ed.length = e.length;
    for (std::size_t q = 0; q < line.size(); ++q) {
      const double s = line.points[q].x();
      ed.parameters.push_back(s);
      ed.points.push_back(ed.start + s * (ed.end - ed.start));
      ed.weights.push_back(line.weights[q] * e.length);
    }
  }

  // Q_b on each edge and the mismatch v_b - Q_b v0.
  for (int le = 0; le < 3; ++le) {
    const EdgeData& ed = _edges[le];
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(dj, dk);
    for (std::size_t q = 0; q < ed.points.size(); ++q) {
      const Eigen::VectorXd L = edge_basis_values(_config.j, ed.parameters[q]);
      const Eigen::VectorXd phi = _basis_k.values(ed.points[q]);
      proj += ed.weights[q] * L * phi.transpose();
    }
    for (int a = 0; a < dj; ++a) {
      proj.row(a) *= (2.0 * a + 1.0) / ed.length;
    }
    _trace_projection[le] = proj;

    Eigen::MatrixXd mis = Eigen::MatrixXd::Zero(2 * dj, nloc);
    for (int i = 0; i < 2; ++i) {
      mis.block(i * dj, _layout.interior(i, 0), dj, dk) = -proj;
      for (int a = 0; a < dj; ++a) {
        mis(i * dj + a, _layout.trace(le, i, a)) = 1.0;
      }
    }
    _mismatch[le] = std::move(mis);
  }

  // delta_w: (delta, phi)_T = <v_b - Q_b v0, phi n>_{dT} for phi in [P_l]^{2x2}.
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(4 * dl, nloc);
  for (int le = 0; le < 3; ++le) {
    const EdgeData& ed = _edges[le];
    Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(dl, dj); // int_e psi_r L_a
    for (std::size_t q = 0; q < ed.points.size(); ++q) {
      coupling += ed.weights[q] * _basis_l.values(ed.points[q]) * edge_basis_values(_config.j, ed.parameters[q]).transpose();
    }
    for (int i = 0; i < 2; ++i) {
      const Eigen::MatrixXd functional = coupling * _mismatch[le].middleRows(i * dj, dj);
      for (int qd = 0; qd < 2; ++qd) {
        rhs.middleRows((2 * i + qd) * dl, dl) += ed.normal[qd] * functional;
      }
    }
  }
  const Eigen::MatrixXd mass_l = mass_matrix(_basis_l);
  _delta.resize(4 * dl, nloc);
  for (int c = 0; c < 4; ++c) {
    _delta.middleRows(c * dl, dl) = solve_local_mass(mass_l, rhs.middleRows(c * dl, dl));
  }

  // Weak divergence: (div_w v, psi)_T = -(v0, grad psi)_T + <v_b . n, psi>_{dT}.
  Eigen::MatrixXd div_rhs = Eigen::MatrixXd::Zero(dm, nloc);
  for (std::size_t q = 0; q < nq; ++q) {
    const Eigen::MatrixX2d grad_psi = _basis_m.gradients(_points[q]);
    const Eigen::RowVectorXd phi = _phi_k.row(static_cast<Eigen::Index>(q));
    for (int i = 0; i < 2; ++i) {
      div_rhs.middleCols(_layout.interior(i, 0), dk) -= _weights[q] * grad_psi.col(i) * phi;
    }
  }
  for (int le = 0; le < 3; ++le) {
    const EdgeData& ed = _edges[le];
    for (std::size_t q = 0; q < ed.points.size(); ++q) {
      const Eigen::VectorXd psi = _basis_m.values(ed.points[q]);
      const Eigen::RowVectorXd L = edge_basis_values(_config.j, ed.parameters[q]).transpose();
      for (int i = 0; i < 2; ++i) {
        div_rhs.middleCols(_layout.trace(le, i, 0), dj) += ed.weights[q] * ed.normal[i] * psi * L;
      }
    }
  }
  _divergence = solve_local_mass(mass_matrix(_basis_m), div_rhs);
}

Eigen::MatrixXd LocalElement::mass_matrix(const ScaledMonomialBasis& basis) const
{
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  for (std::size_t q = 0; q < _points.size(); ++q) {
    const Eigen::VectorXd phi = basis.values(_points[q]);
    mass.noalias() += _weights[q] * phi * phi.transpose();
  }
  return mass;
}

Eigen::Matrix<double, 4, Eigen::Dynamic> LocalElement::weak_gradient_at(std::size_t q) const
{
  const int dk = _layout.dim_interior;
  const int dl = _basis_l.size();
  const auto r = static_cast<Eigen::Index>(q);
  Eigen::Matrix<double, 4, Eigen::Dynamic> g(4, _layout.size());
  for (int c = 0; c < 4; ++c) {
    g.row(c) = _phi_l.row(r) * _delta.middleRows(c * dl, dl);
  }
  for (int i = 0; i < 2; ++i) {
    for (int qd = 0; qd < 2; ++qd) {
      g.row(2 * i + qd).segment(_layout.interior(i, 0), dk) += _grad_k[q].col(qd).transpose();
    }
  }
  return g;
}

Eigen::Matrix<double, 4, Eigen::Dynamic> LocalElement::weak_gradient_at_point(const Point& x) const
{
  const int dk = _layout.dim_interior;
  const int dl = _basis_l.size();
  const Eigen::RowVectorXd psi = _basis_l.values(x).transpose();
  const Eigen::MatrixX2d grad = _basis_k.gradients(x);
  Eigen::Matrix<double, 4, Eigen::Dynamic> g(4, _layout.size());
  for (int c = 0; c < 4; ++c) {
    g.row(c) = psi * _delta.middleRows(c * dl, dl);
  }
  for (int i = 0; i < 2; ++i) {
    for (int qd = 0; qd < 2; ++qd) {
      g.row(2 * i + qd).segment(_layout.interior(i, 0), dk) += grad.col(qd).transpose();
    }
  }
  return g;
}

Eigen::Matrix<double, 2, Eigen::Dynamic> LocalElement::interior_values_at(std::size_t q) const
{
  const int dk = _layout.dim_interior;
  Eigen::Matrix<double, 2, Eigen::Dynamic> v = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, _layout.size());
  for (int i = 0; i < 2; ++i) {
    v.row(i).segment(_layout.interior(i, 0), dk) = _phi_k.row(static_cast<Eigen::Index>(q));
  }
  return v;
}

Eigen::RowVectorXd LocalElement::weak_divergence_at(std::size_t q) const
{
  return _phi_m.row(static_cast<Eigen::Index>(q)) * _divergence;
}

LocalOperator local_weak_gradient(const Mesh& mesh, std::size_t t, const SpaceConfig& config)
{
  const LocalElement el(mesh, t, config);
  LocalOperator op{el.weak_gradient_correction(), LocalOperator::Target::tensor_pl, config.l, false};
  if (config.k - 1 <= config.l) {
    // grad v0 lies in [P_l]^{2x2}: add its exact representation.
    const int dk = el.layout().dim_interior;
    const int dl = el.gradient_basis().size();
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(4 * dl, el.layout().size());
    for (std::size_t q = 0; q < el.n_quad(); ++q) {
      const Eigen::VectorXd psi = el.gradient_basis().values(el.quad_point(q));
      const Eigen::MatrixX2d grad = el.velocity_basis().gradients(el.quad_point(q));
      for (int i = 0; i < 2; ++i) {
        for (int qd = 0; qd < 2; ++qd) {
          rhs.block((2 * i + qd) * dl, el.layout().interior(i, 0), dl, dk) +=
            el.quad_weight(q) * psi * grad.col(qd).transpose();
        }
      }
    }
    const Eigen::MatrixXd mass = el.mass_matrix(el.gradient_basis());
    for (int c = 0; c < 4; ++c) {
      op.matrix.middleRows(c * dl, dl) += solve_local_mass(mass, rhs.middleRows(c * dl, dl));
    }
    op.includes_gradient = true;
  }
  return op;
}

LocalOperator local_weak_divergence(const Mesh& mesh, std::size_t t, const SpaceConfig& config)
{
  const LocalElement el(mesh, t, config);
  return {el.weak_divergence(), LocalOperator::Target::scalar_pm, config.m, true};
}

Eigen::VectorXd project_interior(const ScalarFn& f, const Mesh& mesh, std::size_t t, int degree,
                                 int quadrature_order)
{
  const ScaledMonomialBasis basis = element_basis(mesh, t, degree);
  const QuadRule& rule = triangle_quadrature(quadrature_order);
  const double jac = 2.0 * mesh.element_area(t);
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(basis.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Point x = map_to_element(mesh, t, rule.points[q]);
    const Eigen::VectorXd phi = basis.values(x);
    const double w = jac * rule.weights[q];
    mass.noalias() += w * phi * phi.transpose();
    rhs += w * f(x) * phi;
  }
  return solve_local_mass(mass, rhs);
}

Eigen::MatrixX2d project_interior(const VectorFn& f, const Mesh& mesh, std::size_t t, int degree,
                                  int quadrature_order)
{
  const ScaledMonomialBasis basis = element_basis(mesh, t, degree);
  const QuadRule& rule = triangle_quadrature(quadrature_order);
  const double jac = 2.0 * mesh.element_area(t);
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  Eigen::MatrixX2d rhs = Eigen::MatrixX2d::Zero(basis.size(), 2);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Point x = map_to_element(mesh, t, rule.points[q]);
    const Eigen::VectorXd phi = basis.values(x);
    const double w = jac * rule.weights[q];
    mass.noalias() += w * phi * phi.transpose();
    rhs.noalias() += w * phi * f(x).transpose();
  }
  return solve_local_mass(mass, rhs);
}

Eigen::MatrixX2d project_edge(const VectorFn& f, const Mesh& mesh, std::size_t edge, int degree,
                              int quadrature_order)
{
  const Edge& e = mesh.edges()[edge];
  const Point a = mesh.vertices()[e.vertices[0]];
  const Point b = mesh.vertices()[e.vertices[1]];
  const QuadRule& rule = edge_quadrature(quadrature_order);
  Eigen::MatrixX2d coef = Eigen::MatrixX2d::Zero(degree + 1, 2);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double s = rule.points[q].x();
    coef.noalias() += rule.weights[q] * edge_basis_values(degree, s) * f(a + s * (b - a)).transpose();
  }
  // Legendre on [0,1]: int L_a^2 ds = 1 / (2a + 1).
  for (int r = 0; r <= degree; ++r) {
    coef.row(r) *= 2.0 * r + 1.0;
  }
  return coef;
}

} // namespace gwg
