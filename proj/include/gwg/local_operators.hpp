// Element-local kernels of the generalized weak Galerkin discretization.
//
// A weak function on element T is the interior polynomial v0 in [P_k(T)]^2
// together with one trace polynomial v_b in [P_j(e)]^2 on each of the three
// edges. Local DOFs are laid out as
//
//   [ v0_x (dim P_k) | v0_y (dim P_k) | e0: v_b,x v_b,y | e1: ... | e2: ... ]
//
// with each edge block of size 2 dim P_j. Edge traces are parameterized along
// the global edge direction so that both incident elements see the same
// coefficients.
//
// Gradient tensors use (grad v)_{iq} = d v_i / d x_q, flattened row-major:
// component index 2 i + q.

#ifndef GWG_LOCAL_OPERATORS_HPP
#define GWG_LOCAL_OPERATORS_HPP

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "gwg/basis.hpp"
#include "gwg/mesh.hpp"
#include "gwg/quadrature.hpp"
#include "gwg/space_config.hpp"

namespace gwg
{

using ScalarFn = std::function<double(const Point&)>;
using VectorFn = std::function<Eigen::Vector2d(const Point&)>;

/// Local DOF layout shared by every element of one configuration.
struct LocalLayout
{
  int dim_interior; // dim P_k
  int dim_trace;    // dim P_j

  int size() const { return 2 * dim_interior + 6 * dim_trace; }
  int interior(int component, int b) const { return component * dim_interior + b; }
  int trace(int local_edge, int component, int a) const
  {
    return 2 * dim_interior + local_edge * 2 * dim_trace + component * dim_trace + a;
  }
};

struct LocalOperator
{
  enum class Target
  {
    tensor_pl,
    scalar_pm
  };
  Eigen::MatrixXd matrix; // target dim x local DOFs
  Target target;
  int degree;
  /// For the weak gradient: true when `matrix` holds all of grad v0 + delta_w
  /// (possible when k-1 <= l); false when it holds delta_w only and grad v0
  /// must be added pointwise.
  bool includes_gradient = true;
};

/// Geometry, quadrature and operator data for one element.
class LocalElement
{
public:
  LocalElement(const Mesh& mesh, std::size_t t, const SpaceConfig& config);

  std::size_t index() const { return _t; }
  const LocalLayout& layout() const { return _layout; }
  double area() const { return _area; }
  double diameter() const { return _h; }

  const ScaledMonomialBasis& velocity_basis() const { return _basis_k; }
  const ScaledMonomialBasis& gradient_basis() const { return _basis_l; }
  const ScaledMonomialBasis& divergence_basis() const { return _basis_m; }
  const ScaledMonomialBasis& pressure_basis() const { return _basis_n; }

  /// Element quadrature in physical coordinates.
  std::size_t n_quad() const { return _weights.size(); }
  const Point& quad_point(std::size_t q) const { return _points[q]; }
  double quad_weight(std::size_t q) const { return _weights[q]; }

  struct EdgeData
  {
    std::size_t edge;
    Point start, end; // global edge direction
    Point normal;     // outward from this element
    double length;
    std::vector<Point> points;
    std::vector<double> weights;    // physical
    std::vector<double> parameters; // s in [0,1] along the global direction
  };
  const EdgeData& edge(int local_edge) const { return _edges[local_edge]; }

  /// delta_w coefficients in [P_l]^{2x2}: rows (2 i + q) dim P_l + r.
  const Eigen::MatrixXd& weak_gradient_correction() const { return _delta; }
  /// grad_w . v coefficients in P_m.
  const Eigen::MatrixXd& weak_divergence() const { return _divergence; }
  /// Coefficients of v_b - Q_b v0 on a local edge, rows i dim P_j + a.
  const Eigen::MatrixXd& trace_mismatch(int local_edge) const { return _mismatch[local_edge]; }
  /// Edge Q_b matrix mapping interior coefficients of one component to P_j(e).
  const Eigen::MatrixXd& trace_projection(int local_edge) const { return _trace_projection[local_edge]; }

  /// Weak gradient values (4 x local DOFs) at element quadrature point q.
  Eigen::Matrix<double, 4, Eigen::Dynamic> weak_gradient_at(std::size_t q) const;
  /// Same at an arbitrary point of the element.
  Eigen::Matrix<double, 4, Eigen::Dynamic> weak_gradient_at_point(const Point& x) const;
  /// Interior velocity values (2 x local DOFs) at quadrature point q.
  Eigen::Matrix<double, 2, Eigen::Dynamic> interior_values_at(std::size_t q) const;
  /// Weak divergence values (1 x local DOFs) at quadrature point q.
  Eigen::RowVectorXd weak_divergence_at(std::size_t q) const;

  const Eigen::MatrixXd& velocity_values() const { return _phi_k; }     // n_quad x dim P_k
  const Eigen::MatrixXd& pressure_values() const { return _phi_n; }     // n_quad x dim P_n

  /// Mass matrix of a scaled-monomial basis on this element.
  Eigen::MatrixXd mass_matrix(const ScaledMonomialBasis& basis) const;

private:
  std::size_t _t;
  SpaceConfig _config;
  LocalLayout _layout;
  double _area;
  double _h;
  ScaledMonomialBasis _basis_k, _basis_l, _basis_m, _basis_n;
  std::vector<Point> _points;
  std::vector<double> _weights;
  std::array<EdgeData, 3> _edges;

  Eigen::MatrixXd _phi_k, _phi_l, _phi_m, _phi_n;
  std::vector<Eigen::MatrixX2d> _grad_k;

  Eigen::MatrixXd _delta;
  Eigen::MatrixXd _divergence;
  std::array<Eigen::MatrixXd, 3> _mismatch;
  std::array<Eigen::MatrixXd, 3> _trace_projection;
};

/// Weak gradient operator of element t; see LocalOperator::includes_gradient.
LocalOperator local_weak_gradient(const Mesh& mesh, std::size_t t, const SpaceConfig& config);

LocalOperator local_weak_divergence(const Mesh& mesh, std::size_t t, const SpaceConfig& config);

/// L2 projection of a scalar field onto P_degree(T).
Eigen::VectorXd project_interior(const ScalarFn& f, const Mesh& mesh, std::size_t t, int degree,
                                 int quadrature_order);

/// Componentwise L2 projection onto [P_degree(T)]^2; column c holds component c.
Eigen::MatrixX2d project_interior(const VectorFn& f, const Mesh& mesh, std::size_t t, int degree,
                                  int quadrature_order);

/// Componentwise L2 projection onto [P_degree(e)]^2 in the Legendre edge basis.
Eigen::MatrixX2d project_edge(const VectorFn& f, const Mesh& mesh, std::size_t edge, int degree,
                              int quadrature_order);

/// Dense solve with partial pivoting; throws when the matrix is numerically singular.
Eigen::MatrixXd solve_local_mass(const Eigen::MatrixXd& mass, const Eigen::MatrixXd& rhs);

} // namespace gwg

#endif
