#include <cmath>
#include <random>

#include <doctest.h>

#include "gwg/basis.hpp"
#include "gwg/local_operators.hpp"
#include "gwg/mesh.hpp"
#include "gwg/quadrature.hpp"

using namespace gwg;

namespace
{

double factorial(int n)
{
  return n <= 1 ? 1.0 : n * factorial(n - 1);
}

double integrate(const QuadRule& rule, int a, int b)
{
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    s += rule.weights[q] * std::pow(rule.points[q].x(), a) * std::pow(rule.points[q].y(), b);
  }
  return s;
}

} // namespace

TEST_CASE("triangle rule integrates x^2 y^3 on the reference triangle to 1/420")
{
  CHECK(integrate(triangle_quadrature(5), 2, 3) == doctest::Approx(1.0 / 420.0).epsilon(1e-14));
}

TEST_CASE("triangle rules are exact for every monomial up to their order")
{
  for (int order = 1; order <= max_quadrature_order; ++order) {
    const QuadRule& rule = triangle_quadrature(order);
    for (int a = 0; a <= order; ++a) {
      for (int b = 0; a + b <= order; ++b) {
        const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
        CHECK(integrate(rule, a, b) == doctest::Approx(exact).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("edge rule integrates s^5 on [0,1] to 1/6")
{
  const QuadRule& rule = edge_quadrature(5);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    s += rule.weights[q] * std::pow(rule.points[q].x(), 5);
  }
  CHECK(s == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("quadrature orders outside the table are rejected")
{
  CHECK_THROWS(triangle_quadrature(0));
  CHECK_THROWS(edge_quadrature(max_quadrature_order + 1));
}

TEST_CASE("basis gradients agree with central differences")
{
  const ScaledMonomialBasis basis(Point(0.3, 0.2), 0.25, 3);
  CHECK(basis.size() == 10);
  const Point x(0.41, 0.13);
  const double step = 1e-6;
  const Eigen::MatrixX2d g = basis.gradients(x);
  for (int q = 0; q < 2; ++q) {
    const Point dx = step * Point::Unit(q);
    const Eigen::VectorXd fd = (basis.values(x + dx) - basis.values(x - dx)) / (2 * step);
    CHECK((fd - g.col(q)).norm() < 1e-7);
  }
}

TEST_CASE("basis ordering: constant first, then x, then y")
{
  const ScaledMonomialBasis basis(Point(0.0, 0.0), 2.0, 2);
  const Eigen::VectorXd v = basis.values(Point(1.0, 0.5));
  CHECK(v[0] == doctest::Approx(1.0));
  CHECK(v[1] == doctest::Approx(0.5));
  CHECK(v[2] == doctest::Approx(0.25));
  CHECK(basis.exponents(3) == std::pair<int, int>(2, 0));
}

TEST_CASE("edge basis is Legendre on [0,1]")
{
  const Eigen::VectorXd v = edge_basis_values(2, 0.75);
  CHECK(v[0] == doctest::Approx(1.0));
  CHECK(v[1] == doctest::Approx(0.5));
  CHECK(v[2] == doctest::Approx(0.5 * (3 * 0.25 - 1)));
}

TEST_CASE("P0 projection of sin(x) on the triangle (0,0),(1,0),(1,1) is 2(sin 1 - cos 1)")
{
  const Mesh m = build_uniform_triangulation(1, Diagonal::rising);
  const Eigen::VectorXd c = project_interior([](const Point& x) { return std::sin(x.x()); }, m, 0, 0, 12);
  CHECK(c[0] == doctest::Approx(2.0 * (std::sin(1.0) - std::cos(1.0))).epsilon(1e-13));
}

TEST_CASE("projection reproduces polynomials of its degree")
{
  const Mesh m = build_uniform_triangulation(3, Diagonal::falling);
  const std::size_t t = 7;
  auto f = [](const Point& x) { return 1.0 - 2.0 * x.x() + 3.0 * x.x() * x.y() + x.y() * x.y(); };
  const Eigen::VectorXd c = project_interior(f, m, t, 2, 8);
  const ScaledMonomialBasis basis = element_basis(m, t, 2);
  const Point p = m.centroid(t) + Point(0.01, -0.02);
  CHECK(basis.values(p).dot(c) == doctest::Approx(f(p)).epsilon(1e-12));
}

TEST_CASE("projection residual is orthogonal to the space")
{
  const Mesh m = build_uniform_triangulation(2);
  const std::size_t t = 3;
  auto f = [](const Point& x) { return std::exp(x.x()) * std::cos(2.0 * x.y()); };
  const Eigen::VectorXd c = project_interior(f, m, t, 1, 16);
  const ScaledMonomialBasis basis = element_basis(m, t, 1);
  const QuadRule& rule = triangle_quadrature(16);
  Eigen::VectorXd inner = Eigen::VectorXd::Zero(basis.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Point x = map_to_element(m, t, rule.points[q]);
    const Eigen::VectorXd phi = basis.values(x);
    inner += rule.weights[q] * (f(x) - phi.dot(c)) * phi;
  }
  CHECK(inner.norm() < 1e-14);
}
