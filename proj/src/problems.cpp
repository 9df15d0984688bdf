#include "gwg/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace gwg
{

VectorFn Problem::velocity_at(double t) const
{
  return [f = velocity, t](const Point& x) { return f(x, t); };
}

ScalarFn Problem::pressure_at(double t) const
{
  return [f = pressure, t](const Point& x) { return f(x, t); };
}

VectorFn Problem::forcing_at(double t) const
{
  return [f = forcing, t](const Point& x) { return f(x, t); };
}

VectorFn Problem::beta_field() const
{
  return [f = beta](const Point& x) { return f(x); };
}

namespace
{

// beta = (-x + sin x sin y, cos x cos y), div beta = -1.
Eigen::Vector2d oseen_beta(const Point& p)
{
  const double x = p.x(), y = p.y();
  return {-x + std::sin(x) * std::sin(y), std::cos(x) * std::cos(y)};
}

// U = (x^2 y, -x y^2), P = (2x-1)(2y-1).
Eigen::Vector2d base_velocity(const Point& p)
{
  const double x = p.x(), y = p.y();
  return {x * x * y, -x * y * y};
}

double base_pressure(const Point& p)
{
  return (2.0 * p.x() - 1.0) * (2.0 * p.y() - 1.0);
}

// -lap U
Eigen::Vector2d base_neg_laplacian(const Point& p)
{
  return {-2.0 * p.y(), 2.0 * p.x()};
}

// (beta . grad) U
Eigen::Vector2d base_advection(const Point& p)
{
  const double x = p.x(), y = p.y();
  const Eigen::Vector2d b = oseen_beta(p);
  return {b[0] * 2.0 * x * y + b[1] * x * x, -b[0] * y * y - b[1] * 2.0 * x * y};
}

Eigen::Vector2d base_pressure_gradient(const Point& p)
{
  return {2.0 * (2.0 * p.y() - 1.0), 2.0 * (2.0 * p.x() - 1.0)};
}

} // namespace

Problem manufactured_problem(const std::string& name, double mu, double rho)
{
  Problem pb;
  pb.name = name;
  pb.mu = mu;
  pb.rho = rho;
  if (name == "steady_oseen_ex1") {
    pb.description = "steady Oseen, u = (x^2 y, -x y^2), p = (2x-1)(2y-1)";
    pb.steady = true;
    pb.velocity = [](const Point& x, double) { return base_velocity(x); };
    pb.pressure = [](const Point& x, double) { return base_pressure(x); };
    pb.beta = oseen_beta;
    pb.forcing = [mu, rho](const Point& x, double) -> Eigen::Vector2d {
      return mu * base_neg_laplacian(x) + rho * base_advection(x) + base_pressure_gradient(x);
    };
  } else if (name == "evolutionary_oseen_ex2") {
    pb.description = "evolutionary Oseen on (0,1], u = e^{-t} (x^2 y, -x y^2), p = sin t (2x-1)(2y-1)";
    pb.steady = false;
    pb.final_time = 1.0;
    pb.velocity = [](const Point& x, double t) -> Eigen::Vector2d { return std::exp(-t) * base_velocity(x); };
    pb.pressure = [](const Point& x, double t) { return std::sin(t) * base_pressure(x); };
    pb.beta = oseen_beta;
    pb.forcing = [mu, rho](const Point& x, double t) -> Eigen::Vector2d {
      const double decay = std::exp(-t);
      return decay * (-rho * base_velocity(x) + mu * base_neg_laplacian(x) + rho * base_advection(x)) +
             std::sin(t) * base_pressure_gradient(x);
    };
  } else if (name == "stokes_patch") {
    pb.description = "Stokes patch test, u = (y, x), p = 0, beta = 0, f = 0";
    pb.steady = true;
    pb.velocity = [](const Point& x, double) -> Eigen::Vector2d { return {x.y(), x.x()}; };
    pb.pressure = [](const Point&, double) { return 0.0; };
    pb.beta = [](const Point&) -> Eigen::Vector2d { return Eigen::Vector2d::Zero(); };
    pb.forcing = [](const Point&, double) -> Eigen::Vector2d { return Eigen::Vector2d::Zero(); };
  } else {
    throw std::invalid_argument("unknown problem '" + name + "'");
  }
  return pb;
}

std::vector<std::string> problem_names()
{
  return {"steady_oseen_ex1", "evolutionary_oseen_ex2", "stokes_patch"};
}

} // namespace gwg
