// Uniform triangulations of the unit square with element/edge adjacency,
// fixed edge orientation and per-entity metrics.
//
// Every square cell of side 1/n is split by one of its diagonals, by default
// the one from lower left to upper right. Each edge stores an owner (the incident element with the smaller
// index) and a unit normal pointing away from the owner; on the boundary the
// normal points out of the domain.

#ifndef GWG_MESH_HPP
#define GWG_MESH_HPP

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gwg
{

using Point = Eigen::Vector2d;

/// Marker stored in Edge::neighbor for boundary edges.
inline constexpr std::size_t boundary_marker = static_cast<std::size_t>(-1);

struct Edge
{
  std::array<std::size_t, 2> vertices; // parameterization runs vertices[0] -> vertices[1]
  std::size_t owner;
  std::size_t neighbor; // boundary_marker on the boundary
  Point normal;         // unit, outward from owner
  double length;

  bool is_boundary() const { return neighbor == boundary_marker; }
};

/// Which diagonal splits each square cell.
enum class Diagonal
{
  rising,  // lower left to upper right
  falling  // lower right to upper left
};

/// Parses "rising" / "falling".
Diagonal parse_diagonal(const std::string& name);
std::string diagonal_name(Diagonal diagonal);

struct EdgeOrientation
{
  std::size_t owner;
  std::size_t neighbor;
  Point normal;
};

struct MeshMetrics
{
  double h_max;
  std::vector<double> h_element;
  std::vector<double> h_edge;
};

class Mesh
{
public:
  const std::vector<Point>& vertices() const { return _vertices; }
  const std::vector<std::array<std::size_t, 3>>& elements() const { return _elements; }
  const std::vector<Edge>& edges() const { return _edges; }
  const std::vector<std::size_t>& boundary_edges() const { return _boundary_edges; }

  std::size_t n_vertices() const { return _vertices.size(); }
  std::size_t n_elements() const { return _elements.size(); }
  std::size_t n_edges() const { return _edges.size(); }

  /// Local edge i of element t is opposite local vertex i.
  const std::array<std::size_t, 3>& element_edges(std::size_t t) const { return _element_edges[t]; }
  /// +1 when element t owns the edge (its outward normal equals Edge::normal), -1 otherwise.
  const std::array<int, 3>& element_edge_signs(std::size_t t) const { return _element_edge_signs[t]; }

  double element_diameter(std::size_t t) const { return _h_element[t]; }
  double element_area(std::size_t t) const { return _area[t]; }
  double signed_area(std::size_t t) const;
  Point centroid(std::size_t t) const;
  Point outward_normal(std::size_t t, std::size_t local_edge) const;

  /// Nominal mesh size of the uniform family: side length of the square cells.
  double nominal_h() const { return _nominal_h; }
  std::size_t cells_per_side() const { return _cells_per_side; }

  Diagonal diagonal() const { return _diagonal; }

  friend Mesh build_uniform_triangulation(std::size_t cells_per_side, Diagonal diagonal);

private:
  void finalize();

  std::vector<Point> _vertices;
  std::vector<std::array<std::size_t, 3>> _elements;
  std::vector<Edge> _edges;
  std::vector<std::array<std::size_t, 3>> _element_edges;
  std::vector<std::array<int, 3>> _element_edge_signs;
  std::vector<std::size_t> _boundary_edges;
  std::vector<double> _h_element;
  std::vector<double> _area;
  double _nominal_h = 0.0;
  std::size_t _cells_per_side = 0;
  Diagonal _diagonal = Diagonal::rising;
};

/// Unit square split into n^2 squares, each cut along the chosen diagonal.
Mesh build_uniform_triangulation(std::size_t cells_per_side, Diagonal diagonal = Diagonal::rising);

MeshMetrics mesh_metrics(const Mesh& mesh);

EdgeOrientation edge_orientation(const Mesh& mesh, std::size_t edge_id);

/// Plain-text dump: `vertex x y`, `tri i j k`, `edge i j owner nbr` (nbr = -1 on the boundary).
void write_mesh(std::ostream& os, const Mesh& mesh);

} // namespace gwg

#endif
