#include <doctest.h>

#include "gwg/assembly.hpp"
#include "gwg/local_operators.hpp"
#include "gwg/mesh.hpp"
#include "gwg/space_config.hpp"
#include "gwg/verify.hpp"

using namespace gwg;

namespace
{

SpaceConfig lowest()
{
  return parse_elements("1,0,0,0,0");
}

} // namespace

TEST_CASE("unit trace on one edge has constant weak gradient (|e|/|T|) e_i n^T")
{
  const Mesh m = build_uniform_triangulation(2, Diagonal::falling);
  const SpaceConfig c = lowest();
  const std::size_t t = 5;
  const LocalOperator g = local_weak_gradient(m, t, c);
  REQUIRE(g.target == LocalOperator::Target::tensor_pl);
  REQUIRE(g.degree == 0);
  const LocalLayout layout{poly_dim(1), edge_poly_dim(0)};
  for (int e = 0; e < 3; ++e) {
    const Point n = m.outward_normal(t, static_cast<std::size_t>(e));
    const double ratio = m.edges()[m.element_edges(t)[e]].length / m.element_area(t);
    for (int i = 0; i < 2; ++i) {
      const Eigen::VectorXd col = g.matrix.col(layout.trace(e, i, 0));
      for (int r = 0; r < 2; ++r) {
        for (int q = 0; q < 2; ++q) {
          const double expected = r == i ? ratio * n[q] : 0.0;
          CHECK(col[2 * r + q] == doctest::Approx(expected).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("weak divergence of Q_h (x, y) is 2 on every element")
{
  const Mesh m = build_uniform_triangulation(3);
  const SpaceConfig c = parse_elements("1,0,1,0,0");
  const WeakVelocity w = interpolate_weak([](const Point& x) { return x; }, m, c);
  const DofMap dofs(m, c);
  for (std::size_t t = 0; t < m.n_elements(); ++t) {
    const LocalOperator d = local_weak_divergence(m, t, c);
    const Eigen::VectorXd v = d.matrix * w.local(dofs, t);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("weak gradient of Q_h w equals the L2 projection of grad w for linear w")
{
  const Mesh m = build_uniform_triangulation(2);
  const SpaceConfig c = parse_elements("2,1,1,1,1");
  auto w = [](const Point& x) { return Eigen::Vector2d(1.0 + 2.0 * x.x() - x.y(), 3.0 * x.y() + 0.5 * x.x()); };
  const WeakVelocity qw = interpolate_weak(w, m, c);
  const DofMap dofs(m, c);
  for (std::size_t t = 0; t < m.n_elements(); ++t) {
    const LocalElement el(m, t, c);
    const Eigen::VectorXd v = qw.local(dofs, t);
    for (std::size_t q = 0; q < el.n_quad(); ++q) {
      const Eigen::Vector4d g = el.weak_gradient_at(q) * v;
      CHECK((g - Eigen::Vector4d(2.0, -1.0, 0.5, 3.0)).norm() < 1e-12);
    }
  }
}

TEST_CASE("local mass solve rejects a singular matrix")
{
  CHECK_THROWS(solve_local_mass(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2)));
}

TEST_CASE("both weak-gradient identities hold and a sign flip breaks them")
{
  const Mesh m = build_uniform_triangulation(4);
  for (const char* tuple : {"1,0,1,0,0", "2,1,1,1,1"}) {
    const SpaceConfig c = parse_elements(tuple);
    const WeakIdentityReport ok = check_weak_identities(m, c, 20, 7);
    CHECK(ok.passed());
    CHECK(ok.max_residual() <= 1e-11);
    WeakIdentityOptions flip;
    flip.flip_correction_sign = true;
    CHECK_FALSE(check_weak_identities(m, c, 5, 7, flip).passed());
  }
}
