#ifndef GWG_PROBLEMS_HPP
#define GWG_PROBLEMS_HPP

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gwg/local_operators.hpp"
#include "gwg/mesh.hpp"

namespace gwg
{

/// Manufactured Oseen problem on the unit square.
struct Problem
{
  std::string name;
  std::string description;
  bool steady = true;
  double final_time = 0.0;

  std::function<Eigen::Vector2d(const Point&, double)> velocity;
  std::function<double(const Point&, double)> pressure;
  std::function<Eigen::Vector2d(const Point&)> beta;
  /// rho u_t - mu lap u + rho (beta . grad) u + grad p for the mu, rho the problem was built with.
  std::function<Eigen::Vector2d(const Point&, double)> forcing;

  double mu = 1.0;
  double rho = 1.0;

  VectorFn velocity_at(double t) const;
  ScalarFn pressure_at(double t) const;
  VectorFn forcing_at(double t) const;
  VectorFn beta_field() const;
};

/// Registered names: steady_oseen_ex1, evolutionary_oseen_ex2, stokes_patch.
Problem manufactured_problem(const std::string& name, double mu = 1.0, double rho = 1.0);

std::vector<std::string> problem_names();

} // namespace gwg

#endif
