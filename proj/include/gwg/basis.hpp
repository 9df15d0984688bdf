#ifndef GWG_BASIS_HPP
#define GWG_BASIS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gwg/mesh.hpp"

namespace gwg
{

/// Dimension of P_degree in two variables.
constexpr int poly_dim(int degree)
{
  return (degree + 1) * (degree + 2) / 2;
}

/// Dimension of P_degree on an edge.
constexpr int edge_poly_dim(int degree)
{
  return degree + 1;
}

/// Monomials ((x-xc)/h)^a ((y-yc)/h)^b with a+b <= degree, ordered by total
/// degree and then by decreasing a.
class ScaledMonomialBasis
{
public:
  ScaledMonomialBasis(Point center, double scale, int degree);

  int degree() const { return _degree; }
  int size() const { return poly_dim(_degree); }
  const Point& center() const { return _center; }
  double scale() const { return _scale; }

  Eigen::VectorXd values(const Point& x) const;
  /// Row i is the physical gradient of basis function i.
  Eigen::MatrixX2d gradients(const Point& x) const;

  /// Exponents (a, b) of basis function i.
  std::pair<int, int> exponents(int i) const { return _exponents[i]; }

private:
  Point _center;
  double _scale;
  int _degree;
  std::vector<std::pair<int, int>> _exponents;
};

/// Legendre polynomials P_i(2s-1), i = 0..degree, at parameter s in [0,1].
Eigen::VectorXd edge_basis_values(int degree, double s);

/// Basis on element t of `mesh`: scaled monomials centered at the centroid, scaled by h_T.
ScaledMonomialBasis element_basis(const Mesh& mesh, std::size_t t, int degree);

/// Maps reference-triangle coordinates to physical coordinates on element t.
Point map_to_element(const Mesh& mesh, std::size_t t, const Eigen::Vector2d& reference);

struct BasisEvaluation
{
  Eigen::MatrixXd values;                 // points x basis
  std::vector<Eigen::MatrixX2d> gradients; // per point; empty for edges
};

/// Evaluates the element basis of `degree` at reference-triangle points.
BasisEvaluation eval_element_basis(const Mesh& mesh, std::size_t t, int degree,
                                   std::span<const Eigen::Vector2d> reference_points);

/// Evaluates the edge basis of `degree` at parameters s in [0,1].
BasisEvaluation eval_edge_basis(int degree, std::span<const double> parameters);

} // namespace gwg

#endif
