#include "gwg/basis.hpp"

#include <cmath>

namespace gwg
{

ScaledMonomialBasis::ScaledMonomialBasis(Point center, double scale, int degree)
  : _center(center), _scale(scale), _degree(degree)
{
  _exponents.reserve(poly_dim(degree));
  for (int d = 0; d <= degree; ++d) {
    for (int a = d; a >= 0; --a) {
      _exponents.emplace_back(a, d - a);
    }
  }
}

namespace
{

// powers[p] = z^p for p = 0..degree
void fill_powers(double z, int degree, std::vector<double>& powers)
{
  powers.resize(degree + 1);
  powers[0] = 1.0;
  for (int p = 1; p <= degree; ++p) {
    powers[p] = powers[p - 1] * z;
  }
}

} // namespace

Eigen::VectorXd ScaledMonomialBasis::values(const Point& x) const
{
  std::vector<double> px, py;
  fill_powers((x.x() - _center.x()) / _scale, _degree, px);
  fill_powers((x.y() - _center.y()) / _scale, _degree, py);
  Eigen::VectorXd v(size());
  for (int i = 0; i < size(); ++i) {
    const auto [a, b] = _exponents[i];
    v[i] = px[a] * py[b];
  }
  return v;
}

Eigen::MatrixX2d ScaledMonomialBasis::gradients(const Point& x) const
{
  std::vector<double> px, py;
  fill_powers((x.x() - _center.x()) / _scale, _degree, px);
  fill_powers((x.y() - _center.y()) / _scale, _degree, py);
  Eigen::MatrixX2d g(size(), 2);
  for (int i = 0; i < size(); ++i) {
    const auto [a, b] = _exponents[i];
    g(i, 0) = a > 0 ? a * px[a - 1] * py[b] / _scale : 0.0;
    g(i, 1) = b > 0 ? b * px[a] * py[b - 1] / _scale : 0.0;
  }
  return g;
}

Eigen::VectorXd edge_basis_values(int degree, double s)
{
  Eigen::VectorXd v(degree + 1);
  const double x = 2.0 * s - 1.0;
  v[0] = 1.0;
  if (degree >= 1) {
    v[1] = x;
  }
  for (int r = 2; r <= degree; ++r) {
    v[r] = ((2.0 * r - 1.0) * x * v[r - 1] - (r - 1.0) * v[r - 2]) / r;
  }
  return v;
}

ScaledMonomialBasis element_basis(const Mesh& mesh, std::size_t t, int degree)
{
  return ScaledMonomialBasis(mesh.centroid(t), mesh.element_diameter(t), degree);
}

Point map_to_element(const Mesh& mesh, std::size_t t, const Eigen::Vector2d& reference)
{
  const auto& el = mesh.elements()[t];
  const auto& v = mesh.vertices();
  return v[el[0]] + reference.x() * (v[el[1]] - v[el[0]]) + reference.y() * (v[el[2]] - v[el[0]]);
}

BasisEvaluation eval_element_basis(const Mesh& mesh, std::size_t t, int degree,
                                   std::span<const Eigen::Vector2d> reference_points)
{
  const ScaledMonomialBasis basis = element_basis(mesh, t, degree);
  BasisEvaluation out;
  out.values.resize(static_cast<Eigen::Index>(reference_points.size()), basis.size());
  out.gradients.reserve(reference_points.size());
  for (std::size_t q = 0; q < reference_points.size(); ++q) {
    const Point x = map_to_element(mesh, t, reference_points[q]);
    out.values.row(static_cast<Eigen::Index>(q)) = basis.values(x).transpose();
    out.gradients.push_back(basis.gradients(x));
  }
  return out;
}

BasisEvaluation eval_edge_basis(int degree, std::span<const double> parameters)
{
  BasisEvaluation out;
  out.values.resize(static_cast<Eigen::Index>(parameters.size()), degree + 1);
  for (std::size_t q = 0; q < parameters.size(); ++q) {
    out.values.row(static_cast<Eigen::Index>(q)) = edge_basis_values(degree, parameters[q]).transpose();
  }
  return out;
}

} // namespace gwg
