#include "gwg/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gwg
{

namespace
{

void check_order(int order, const char* who)
{
  if (order < 1 || order > max_quadrature_order) {
    throw std::invalid_argument(std::string(who) + ": unsupported order " + std::to_string(order));
  }
}

} // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  auto legendre = [n](double x, double& value, double& derivative) {
    double p0 = 1.0, p1 = x;
    for (int r = 2; r <= n; ++r) {
      const double p2 = ((2.0 * r - 1.0) * x * p1 - (r - 1.0) * p0) / r;
      p0 = p1;
      p1 = p2;
    }
    value = p1;
    derivative = n * (x * p1 - p0) / (x * x - 1.0);
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      legendre(x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    legendre(x, p, dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (n % 2 == 1) {
    nodes[n / 2] = 0.0;
  }
}

namespace
{

QuadRule build_edge_rule(int order)
{
  const int n = order / 2 + 1;
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  QuadRule rule;
  rule.order = order;
  for (int i = 0; i < n; ++i) {
    rule.points.emplace_back(0.5 * (x[i] + 1.0), 0.0);
    rule.weights.push_back(0.5 * w[i]);
  }
  return rule;
}

QuadRule build_triangle_rule(int order)
{
  // (u, v) in [0,1]^2 -> (u, (1-u) v); the Jacobian (1-u) raises the degree in u by one.
  const int nu = (order + 1) / 2 + 1;
  const int nv = order / 2 + 1;
  std::vector<double> xu, wu, xv, wv;
  gauss_legendre(nu, xu, wu);
  gauss_legendre(nv, xv, wv);
  QuadRule rule;
  rule.order = order;
  for (int i = 0; i < nu; ++i) {
    const double u = 0.5 * (xu[i] + 1.0);
    for (int k = 0; k < nv; ++k) {
      const double v = 0.5 * (xv[k] + 1.0);
      rule.points.emplace_back(u, (1.0 - u) * v);
      rule.weights.push_back(0.25 * wu[i] * wv[k] * (1.0 - u));
    }
  }
  return rule;
}

template <QuadRule (*Build)(int)>
const QuadRule& cached_rule(int order)
{
  // Built once; afterwards read-only and safe to share between threads.
  static const std::vector<QuadRule> table = [] {
    std::vector<QuadRule> rules;
    for (int o = 1; o <= max_quadrature_order; ++o) {
      rules.push_back(Build(o));
    }
    return rules;
  }();
  return table[static_cast<std::size_t>(order - 1)];
}

} // namespace

const QuadRule& edge_quadrature(int order)
{
  check_order(order, "edge_quadrature");
  return cached_rule<build_edge_rule>(order);
}

const QuadRule& triangle_quadrature(int order)
{
  check_order(order, "triangle_quadrature");
  return cached_rule<build_triangle_rule>(order);
}

} // namespace gwg
