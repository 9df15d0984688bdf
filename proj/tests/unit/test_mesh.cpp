#include <cmath>
#include <sstream>

#include <doctest.h>

#include "gwg/mesh.hpp"

using namespace gwg;

TEST_CASE("single cell has 4 vertices, 2 triangles, 5 edges")
{
  const Mesh m = build_uniform_triangulation(1);
  CHECK(m.n_vertices() == 4);
  CHECK(m.n_elements() == 2);
  CHECK(m.n_edges() == 5);
  CHECK(m.boundary_edges().size() == 4);
}

TEST_CASE("eight cells per side: 81 vertices, 128 triangles, 208 edges")
{
  for (Diagonal d : {Diagonal::rising, Diagonal::falling}) {
    const Mesh m = build_uniform_triangulation(8, d);
    CHECK(m.n_vertices() == 81);
    CHECK(m.n_elements() == 128);
    CHECK(m.n_edges() == 208);
    CHECK(m.boundary_edges().size() == 32);
    CHECK(mesh_metrics(m).h_max == doctest::Approx(std::sqrt(2.0) / 8.0));
    CHECK(m.nominal_h() == doctest::Approx(0.125));
  }
}

TEST_CASE("areas sum to one and every element is positively oriented")
{
  const Mesh m = build_uniform_triangulation(5, Diagonal::falling);
  double total = 0.0;
  for (std::size_t t = 0; t < m.n_elements(); ++t) {
    CHECK(m.signed_area(t) > 0.0);
    CHECK(m.element_area(t) == doctest::Approx(1.0 / 50.0));
    total += m.element_area(t);
  }
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("diagonal choice fixes the first element")
{
  const Mesh rising = build_uniform_triangulation(1, Diagonal::rising);
  const Mesh falling = build_uniform_triangulation(1, Diagonal::falling);
  // Rising: (0,0),(1,0),(1,1); falling: (0,0),(1,0),(0,1).
  CHECK(rising.centroid(0).x() == doctest::Approx(2.0 / 3.0));
  CHECK(rising.centroid(0).y() == doctest::Approx(1.0 / 3.0));
  CHECK(falling.centroid(0).x() == doctest::Approx(1.0 / 3.0));
  CHECK(falling.centroid(0).y() == doctest::Approx(1.0 / 3.0));
  CHECK(parse_diagonal("falling") == Diagonal::falling);
  CHECK(diagonal_name(Diagonal::rising) == "rising");
  CHECK_THROWS_AS(parse_diagonal("sideways"), std::invalid_argument);
}

TEST_CASE("outward normals close around each element and flip across shared edges")
{
  const Mesh m = build_uniform_triangulation(4);
  for (std::size_t t = 0; t < m.n_elements(); ++t) {
    Point sum = Point::Zero();
    for (std::size_t i = 0; i < 3; ++i) {
      const Edge& e = m.edges()[m.element_edges(t)[i]];
      const Point n = m.outward_normal(t, i);
      CHECK(n.norm() == doctest::Approx(1.0));
      CHECK((n - m.element_edge_signs(t)[i] * e.normal).norm() < 1e-14);
      // Points away from the centroid.
      const Point mid = 0.5 * (m.vertices()[e.vertices[0]] + m.vertices()[e.vertices[1]]);
      CHECK(n.dot(mid - m.centroid(t)) > 0.0);
      sum += e.length * n;
    }
    CHECK(sum.norm() < 1e-14);
  }
  for (std::size_t id = 0; id < m.n_edges(); ++id) {
    const Edge& e = m.edges()[id];
    if (e.is_boundary()) {
      const Point mid = 0.5 * (m.vertices()[e.vertices[0]] + m.vertices()[e.vertices[1]]);
      CHECK(e.normal.dot(mid - Point(0.5, 0.5)) > 0.0);
    } else {
      CHECK(e.owner < e.neighbor);
    }
  }
}

TEST_CASE("mesh dump lists every entity")
{
  std::ostringstream os;
  write_mesh(os, build_uniform_triangulation(1));
  const std::string s = os.str();
  std::size_t lines = 0;
  for (char c : s) lines += c == '\n';
  CHECK(lines == 4 + 2 + 5);
  CHECK(s.find("tri ") != std::string::npos);
}

TEST_CASE("zero cells per side is rejected")
{
  CHECK_THROWS_AS(build_uniform_triangulation(0), std::invalid_argument);
}
