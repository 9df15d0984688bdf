#ifndef GWG_QUADRATURE_HPP
#define GWG_QUADRATURE_HPP

#include <vector>

#include <Eigen/Core>

namespace gwg
{

/// Quadrature on a reference entity. Triangle points are Cartesian
/// coordinates on {(0,0),(1,0),(0,1)} (barycentric (1-x-y, x, y)); edge
/// points are the parameter s in [0,1]. Weights sum to the reference measure.
struct QuadRule
{
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;
  int order = 0;

  std::size_t size() const { return weights.size(); }
};

inline constexpr int max_quadrature_order = 20;

/// Collapsed (Duffy) Gauss product rule, exact up to total degree `order`.
const QuadRule& triangle_quadrature(int order);

/// Gauss-Legendre rule on [0,1] exact up to degree `order`; the parameter is stored in points[i].x().
const QuadRule& edge_quadrature(int order);

/// n-point Gauss-Legendre nodes and weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace gwg

#endif
