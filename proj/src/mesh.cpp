#include "gwg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace gwg
{

Diagonal parse_diagonal(const std::string& name)
{
  if (name == "rising") return Diagonal::rising;
  if (name == "falling") return Diagonal::falling;
  throw std::invalid_argument("unknown diagonal '" + name + "' (expected rising or falling)");
}

std::string diagonal_name(Diagonal diagonal)
{
  return diagonal == Diagonal::rising ? "rising" : "falling";
}

Mesh build_uniform_triangulation(std::size_t cells_per_side, Diagonal diagonal)
{
  if (cells_per_side == 0) {
    throw std::invalid_argument("build_uniform_triangulation: cells_per_side must be positive");
  }
  const std::size_t n = cells_per_side;
  const double h = 1.0 / static_cast<double>(n);

  Mesh mesh;
  mesh._cells_per_side = n;
  mesh._nominal_h = h;
  mesh._diagonal = diagonal;
  mesh._vertices.reserve((n + 1) * (n + 1));
  for (std::size_t iy = 0; iy <= n; ++iy) {
    for (std::size_t ix = 0; ix <= n; ++ix) {
      mesh._vertices.emplace_back(static_cast<double>(ix) * h, static_cast<double>(iy) * h);
    }
  }
  auto vid = [n](std::size_t ix, std::size_t iy) { return iy * (n + 1) + ix; };

  mesh._elements.reserve(2 * n * n);
  for (std::size_t iy = 0; iy < n; ++iy) {
    for (std::size_t ix = 0; ix < n; ++ix) {
      const std::size_t v00 = vid(ix, iy), v10 = vid(ix + 1, iy);
      const std::size_t v01 = vid(ix, iy + 1), v11 = vid(ix + 1, iy + 1);
      // Two counterclockwise triangles per cell; the first touches the lower edge.
      if (diagonal == Diagonal::rising) {
        mesh._elements.push_back({v00, v10, v11});
        mesh._elements.push_back({v00, v11, v01});
      } else {
        mesh._elements.push_back({v00, v10, v01});
        mesh._elements.push_back({v10, v11, v01});
      }
    }
  }
  mesh.finalize();
  return mesh;
}

void Mesh::finalize()
{
  const std::size_t n_el = _elements.size();
  _element_edges.assign(n_el, {0, 0, 0});
  _element_edge_signs.assign(n_el, {1, 1, 1});
  _area.resize(n_el);
  _h_element.resize(n_el);

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_index;
  for (std::size_t t = 0; t < n_el; ++t) {
    const auto& el = _elements[t];
    for (std::size_t i = 0; i < 3; ++i) {
      const std::size_t a = el[(i + 1) % 3];
      const std::size_t b = el[(i + 2) % 3];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = edge_index.try_emplace({key.first, key.second}, _edges.size());
      if (inserted) {
        Edge e;
        e.vertices = {key.first, key.second};
        e.owner = t;
        e.neighbor = boundary_marker;
        e.length = (_vertices[b] - _vertices[a]).norm();
        _edges.push_back(e);
      } else {
        Edge& e = _edges[it->second];
        if (e.neighbor != boundary_marker) {
          throw std::logic_error("Mesh: edge shared by more than two elements");
        }
        e.neighbor = t;
      }
      _element_edges[t][i] = it->second;
    }
    _area[t] = signed_area(t);
    if (_area[t] <= 0.0) {
      throw std::logic_error("Mesh: element " + std::to_string(t) + " is not counterclockwise");
    }
    double diam = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      diam = std::max(diam, (_vertices[el[(i + 1) % 3]] - _vertices[el[i]]).norm());
    }
    _h_element[t] = diam;
  }

  // Elements are visited in increasing index order, so the first incident
  // element recorded is the owner.
  for (std::size_t t = 0; t < n_el; ++t) {
    const auto& el = _elements[t];
    for (std::size_t i = 0; i < 3; ++i) {
      Edge& e = _edges[_element_edges[t][i]];
      if (e.owner == t) {
        const Point tangent = _vertices[el[(i + 2) % 3]] - _vertices[el[(i + 1) % 3]];
        // Counterclockwise ordering: the outward normal is the tangent rotated clockwise.
        e.normal = Point(tangent.y(), -tangent.x()) / tangent.norm();
        _element_edge_signs[t][i] = 1;
      } else {
        _element_edge_signs[t][i] = -1;
      }
    }
  }

  _boundary_edges.clear();
  for (std::size_t e = 0; e < _edges.size(); ++e) {
    if (_edges[e].is_boundary()) {
      _boundary_edges.push_back(e);
    }
  }
}

double Mesh::signed_area(std::size_t t) const
{
  const auto& el = _elements[t];
  const Point a = _vertices[el[1]] - _vertices[el[0]];
  const Point b = _vertices[el[2]] - _vertices[el[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

Point Mesh::centroid(std::size_t t) const
{
  const auto& el = _elements[t];
  return (_vertices[el[0]] + _vertices[el[1]] + _vertices[el[2]]) / 3.0;
}

Point Mesh::outward_normal(std::size_t t, std::size_t local_edge) const
{
  return static_cast<double>(_element_edge_signs[t][local_edge]) * _edges[_element_edges[t][local_edge]].normal;
}

MeshMetrics mesh_metrics(const Mesh& mesh)
{
  MeshMetrics m;
  m.h_element.resize(mesh.n_elements());
  m.h_max = 0.0;
  for (std::size_t t = 0; t < mesh.n_elements(); ++t) {
    m.h_element[t] = mesh.element_diameter(t);
    m.h_max = std::max(m.h_max, m.h_element[t]);
  }
  m.h_edge.resize(mesh.n_edges());
  for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
    m.h_edge[e] = mesh.edges()[e].length;
  }
  return m;
}

EdgeOrientation edge_orientation(const Mesh& mesh, std::size_t edge_id)
{
  if (edge_id >= mesh.n_edges()) {
    throw std::out_of_range("edge_orientation: invalid edge id " + std::to_string(edge_id));
  }
  const Edge& e = mesh.edges()[edge_id];
  return {e.owner, e.neighbor, e.normal};
}

void write_mesh(std::ostream& os, const Mesh& mesh)
{
  const auto old_precision = os.precision(17);
  for (const Point& v : mesh.vertices()) {
    os << "vertex " << v.x() << ' ' << v.y() << '\n';
  }
  for (const auto& el : mesh.elements()) {
    os << "tri " << el[0] << ' ' << el[1] << ' ' << el[2] << '\n';
  }
  for (const Edge& e : mesh.edges()) {
    os << "edge " << e.vertices[0] << ' ' << e.vertices[1] << ' ' << e.owner << ' ';
    if (e.is_boundary()) {
      os << -1;
    } else {
      os << e.neighbor;
    }
    os << '\n';
  }
  os.precision(old_precision);
}

} // namespace gwg
