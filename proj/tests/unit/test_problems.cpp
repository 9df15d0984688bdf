#include <cmath>
#include <random>

#include <doctest.h>

#include "gwg/problems.hpp"
#include "gwg/quadrature.hpp"

using namespace gwg;

namespace
{

// Richardson-extrapolated central differences: O(d^4) truncation.
template <typename F>
auto richardson(F&& central, double d)
{
  using Value = decltype(central(d));
  return Value((4.0 * central(d / 2) - central(d)) / 3.0);
}

// Strong-form residual rho u_t - mu lap u + rho (beta . grad) u + grad p by differences.
Eigen::Vector2d forcing_by_differences(const Problem& pb, const Point& x, double t)
{
  const double d = 1e-2;
  auto u = [&](const Point& y, double s) { return pb.velocity(y, s); };
  auto p = [&](const Point& y) { return pb.pressure(y, t); };
  const Point ex(1.0, 0.0), ey(0.0, 1.0);
  auto ddx = [&](const Point& dir) {
    return richardson([&](double h) -> Eigen::Vector2d { return (u(x + h * dir, t) - u(x - h * dir, t)) / (2 * h); }, d);
  };
  auto lap = [&](const Point& dir) {
    return richardson(
      [&](double h) -> Eigen::Vector2d { return (u(x + h * dir, t) - 2.0 * u(x, t) + u(x - h * dir, t)) / (h * h); }, d);
  };
  auto dp = [&](const Point& dir) {
    return richardson([&](double h) { return (p(x + h * dir) - p(x - h * dir)) / (2 * h); }, d);
  };
  const Eigen::Vector2d ut =
    pb.steady ? Eigen::Vector2d(Eigen::Vector2d::Zero())
              : richardson([&](double h) -> Eigen::Vector2d { return (u(x, t + h) - u(x, t - h)) / (2 * h); }, d);
  const Eigen::Vector2d b = pb.beta(x);
  const Eigen::Vector2d laplacian = lap(ex) + lap(ey);
  const Eigen::Vector2d convection = b.x() * ddx(ex) + b.y() * ddx(ey);
  return pb.rho * ut - pb.mu * laplacian + pb.rho * convection + Eigen::Vector2d(dp(ex), dp(ey));
}

} // namespace

TEST_CASE("forcing matches the strong form at 20 random points to 1e-8")
{
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (const auto& [name, mu, rho] : {std::tuple{"steady_oseen_ex1", 1.0, 1.0}, std::tuple{"steady_oseen_ex1", 0.1, 2.0},
                                      std::tuple{"evolutionary_oseen_ex2", 1.0, 1.0},
                                      std::tuple{"evolutionary_oseen_ex2", 0.5, 3.0}}) {
    const Problem pb = manufactured_problem(name, mu, rho);
    for (int i = 0; i < 20; ++i) {
      const Point x(unit(rng), unit(rng));
      const double t = pb.steady ? 0.0 : unit(rng);
      const Eigen::Vector2d fd = forcing_by_differences(pb, x, t);
      CHECK((pb.forcing(x, t) - fd).norm() < 1e-8);
    }
  }
}

TEST_CASE("manufactured velocities are divergence free")
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const std::string& name : problem_names()) {
    const Problem pb = manufactured_problem(name);
    for (int i = 0; i < 10; ++i) {
      const Point x(unit(rng), unit(rng));
      const double t = 0.5, h = 1e-5;
      const double div = (pb.velocity(x + Point(h, 0), t).x() - pb.velocity(x - Point(h, 0), t).x()) / (2 * h) +
                         (pb.velocity(x + Point(0, h), t).y() - pb.velocity(x - Point(0, h), t).y()) / (2 * h);
      CHECK(std::abs(div) < 1e-9);
    }
  }
}

TEST_CASE("manufactured pressures have zero mean")
{
  const QuadRule& rule = triangle_quadrature(12);
  for (const std::string& name : problem_names()) {
    const Problem pb = manufactured_problem(name);
    // Two reference triangles cover the unit square.
    double mean = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point r = rule.points[q];
      mean += rule.weights[q] * (pb.pressure(r, 0.7) + pb.pressure(Point(1.0, 1.0) - r, 0.7));
    }
    CHECK(std::abs(mean) < 1e-14);
  }
}

TEST_CASE("the first example has div beta = -1")
{
  const Problem pb = manufactured_problem("steady_oseen_ex1");
  const Point x(0.3, 0.8);
  const double h = 1e-5;
  const double div = (pb.beta(x + Point(h, 0)).x() - pb.beta(x - Point(h, 0)).x()) / (2 * h) +
                     (pb.beta(x + Point(0, h)).y() - pb.beta(x - Point(0, h)).y()) / (2 * h);
  CHECK(div == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("evolutionary initial velocity is (x^2 y, -x y^2)")
{
  const Problem pb = manufactured_problem("evolutionary_oseen_ex2");
  const Eigen::Vector2d u = pb.velocity(Point(0.5, 0.25), 0.0);
  CHECK(u.x() == doctest::Approx(0.0625));
  CHECK(u.y() == doctest::Approx(-0.03125));
  CHECK_FALSE(pb.steady);
  CHECK(pb.final_time == 1.0);
}

TEST_CASE("unknown problems are rejected")
{
  CHECK_THROWS(manufactured_problem("lid_driven_cavity"));
}
