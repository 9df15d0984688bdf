#ifndef GWG_SPACE_CONFIG_HPP
#define GWG_SPACE_CONFIG_HPP

#include <string>

namespace gwg
{

/// Degrees and parameters fixing one generalized weak Galerkin discretization.
///
/// Velocity interiors live in [P_k]^2, velocity traces in [P_j]^2 per edge,
/// the weak gradient correction in [P_l]^{2x2}, the weak divergence in P_m,
/// and the pressure in P_n per element.
struct SpaceConfig
{
  int k = 1;
  int j = 0;
  int l = 1;
  int m = 0;
  int n = 0;

  double gamma = 1.0; // s1 weight exponent on h_T
  double alpha = 0.0; // s2 weight exponent on h_e
  double zeta = 1.0;  // s1 weight
  int sigma = 0;      // s2 switch
  double mu = 1.0;
  double rho = 1.0;

  /// 0 selects the default 2 max(k, j, l, m, n) + 4.
  int quadrature_order = 0;

  int effective_quadrature_order() const;
  int max_degree() const;

  /// Checks ranges and signs only.
  void validate_parameters() const;

  /// Also requires k-1 <= n <= max(m, k+1), and n <= j when sigma = 0,
  /// unless `allow_incompatible` is set.
  void validate(bool allow_incompatible = false) const;

  std::string element_string() const;
};

/// Parses "k,j,l,m,n".
SpaceConfig parse_elements(const std::string& tuple, SpaceConfig base = {});

} // namespace gwg

#endif
