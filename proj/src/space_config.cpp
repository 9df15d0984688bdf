#include "gwg/space_config.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "gwg/quadrature.hpp"

namespace gwg
{

int SpaceConfig::max_degree() const
{
  return std::max({k, j, l, m, n});
}

int SpaceConfig::effective_quadrature_order() const
{
  const int order = quadrature_order > 0 ? quadrature_order : 2 * max_degree() + 4;
  return std::min(order, max_quadrature_order);
}

void SpaceConfig::validate_parameters() const
{
  if (k < 0 || j < 0 || l < 0 || m < 0 || n < 0) {
    throw std::invalid_argument("SpaceConfig: polynomial degrees must be non-negative");
  }
  if (!(zeta > 0.0)) {
    throw std::invalid_argument("SpaceConfig: zeta must be positive");
  }
  if (!(mu > 0.0)) {
    throw std::invalid_argument("SpaceConfig: mu must be positive");
  }
  if (!(rho > 0.0)) {
    throw std::invalid_argument("SpaceConfig: rho must be positive");
  }
  if (sigma != 0 && sigma != 1) {
    throw std::invalid_argument("SpaceConfig: sigma must be 0 or 1");
  }
  if (2 * max_degree() + 2 > max_quadrature_order) {
    throw std::invalid_argument("SpaceConfig: degrees exceed the supported quadrature range");
  }
}

void SpaceConfig::validate(bool allow_incompatible) const
{
  validate_parameters();
  if (allow_incompatible) {
    return;
  }
  if (k - 1 > n || n > std::max(m, k + 1)) {
    throw std::invalid_argument("SpaceConfig " + element_string() + ": requires k-1 <= n <= max(m, k+1)");
  }
  if (sigma == 0 && n > j) {
    throw std::invalid_argument("SpaceConfig " + element_string() + ": requires n <= j without the s2 stabilizer");
  }
}

std::string SpaceConfig::element_string() const
{
  std::ostringstream os;
  os << '(' << k << ',' << j << ',' << l << ',' << m << ',' << n << ')';
  return os.str();
}

SpaceConfig parse_elements(const std::string& tuple, SpaceConfig base)
{
  std::vector<int> values;
  std::stringstream ss(tuple);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("parse_elements: bad degree '" + item + "'");
    }
    if (used != item.size()) {
      throw std::invalid_argument("parse_elements: bad degree '" + item + "'");
    }
    values.push_back(v);
  }
  if (values.size() != 5) {
    throw std::invalid_argument("parse_elements: expected k,j,l,m,n but got '" + tuple + "'");
  }
  base.k = values[0];
  base.j = values[1];
  base.l = values[2];
  base.m = values[3];
  base.n = values[4];
  return base;
}

} // namespace gwg
