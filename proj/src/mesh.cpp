#include "dgschwarz/mesh.hpp"

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace dgschwarz {

namespace {

Point outer_normal(const Point& a, const Point& b, const Point& opposite) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len = std::hypot(dx, dy);
  Point n{dy / len, -dx / len};
  if ((opposite.x - a.x) * n.x + (opposite.y - a.y) * n.y > 0.0) n = {-n.x, -n.y};
  return n;
}

int local_index(const std::array<int, 3>& tri, int v) {
  for (int j = 0; j < 3; ++j) {
    if (tri[j] == v) return j;
  }
  throw std::logic_error("vertex not in triangle");
}

}  // namespace

Mesh::Mesh(const MeshConfig& config) : config_(config) {
  if (config.subdomains_per_side < 1 || config.cells_per_subdomain_side < 1) {
    throw std::invalid_argument("mesh: subdomains_per_side and cells_per_subdomain_side must be >= 1");
  }
  const int n = cells_per_side();
  const double dn = static_cast<double>(n);

  vertices_.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) vertices_.push_back({i / dn, j / dn});
  }

  triangles_.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int bl = vertex_index(i, j);
      const int br = vertex_index(i + 1, j);
      const int tr = vertex_index(i + 1, j + 1);
      const int tl = vertex_index(i, j + 1);
      triangles_.push_back({br, tr, bl});
      triangles_.push_back({tl, bl, tr});
    }
  }

  // Edges in order of first appearance; the first triangle met is tri_plus.
  std::unordered_map<std::uint64_t, int> edge_of_pair;
  edge_of_pair.reserve(3 * triangles_.size());
  triangle_edges_.resize(triangles_.size());
  for (int t = 0; t < static_cast<int>(triangles_.size()); ++t) {
    const auto& tri = triangles_[t];
    for (int j = 0; j < 3; ++j) {
      const int a = tri[(j + 1) % 3];
      const int b = tri[(j + 2) % 3];
      const auto key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) | static_cast<std::uint32_t>(std::max(a, b));
      auto [it, inserted] = edge_of_pair.try_emplace(key, static_cast<int>(edges_.size()));
      if (inserted) {
        Edge e;
        e.kind = EdgeKind::Boundary;
        e.tri_plus = t;
        e.vertices = {a, b};
        e.local_plus = {(j + 1) % 3, (j + 2) % 3};
        e.length = std::hypot(vertices_[b].x - vertices_[a].x, vertices_[b].y - vertices_[a].y);
        e.normal = outer_normal(vertices_[a], vertices_[b], vertices_[tri[j]]);
        edges_.push_back(e);
      } else {
        Edge& e = edges_[it->second];
        if (e.tri_minus >= 0) throw std::logic_error("mesh: edge shared by more than two triangles");
        e.kind = EdgeKind::Interior;
        e.tri_minus = t;
        e.local_minus = {local_index(tri, e.vertices[0]), local_index(tri, e.vertices[1])};
      }
      triangle_edges_[t][j] = it->second;
    }
  }

  // nu(x): DG nodes grouped by geometric vertex, ascending node id.
  vertex_node_offsets_.assign(vertices_.size() + 1, 0);
  for (const auto& tri : triangles_) {
    for (int v : tri) ++vertex_node_offsets_[v + 1];
  }
  for (std::size_t v = 0; v < vertices_.size(); ++v) vertex_node_offsets_[v + 1] += vertex_node_offsets_[v];
  vertex_nodes_.resize(num_dg_nodes());
  auto fill = vertex_node_offsets_;
  for (int t = 0; t < static_cast<int>(triangles_.size()); ++t) {
    for (int j = 0; j < 3; ++j) vertex_nodes_[fill[triangles_[t][j]]++] = dg_node(t, j);
  }
}

std::array<int, 2> Mesh::vertex_grid(int v) const {
  const int stride = cells_per_side() + 1;
  return {v % stride, v / stride};
}

std::array<int, 2> Mesh::cell_of(int t) const {
  const int c = t / 2;
  return {c % cells_per_side(), c / cells_per_side()};
}

double Mesh::area(int t) const {
  const auto& tri = triangles_[t];
  const Point& a = vertices_[tri[0]];
  const Point& b = vertices_[tri[1]];
  const Point& c = vertices_[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Point Mesh::barycenter(int t) const {
  const auto& tri = triangles_[t];
  Point p;
  for (int v : tri) {
    p.x += vertices_[v].x;
    p.y += vertices_[v].y;
  }
  return {p.x / 3.0, p.y / 3.0};
}

std::array<Point, 3> Mesh::basis_gradients(int t) const {
  const auto& tri = triangles_[t];
  const Point& p0 = vertices_[tri[0]];
  const Point& p1 = vertices_[tri[1]];
  const Point& p2 = vertices_[tri[2]];
  const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
  return {Point{(p1.y - p2.y) / det, (p2.x - p1.x) / det}, Point{(p2.y - p0.y) / det, (p0.x - p2.x) / det},
          Point{(p0.y - p1.y) / det, (p1.x - p0.x) / det}};
}

std::span<const int> Mesh::nodes_at_vertex(int v) const {
  return std::span<const int>(vertex_nodes_)
      .subspan(vertex_node_offsets_[v], vertex_node_offsets_[v + 1] - vertex_node_offsets_[v]);
}

int Mesh::mirror_triangle(int t, MirrorAxis axis) const {
  auto [i, j] = cell_of(t);
  const int n = cells_per_side();
  if (axis == MirrorAxis::X) {
    i = n - 1 - i;
  } else {
    j = n - 1 - j;
  }
  return 2 * (j * n + i) + (t % 2);
}

void Mesh::write_summary(std::ostream& out) const {
  std::size_t interior = 0;
  for (const auto& e : edges_) interior += e.kind == EdgeKind::Interior;
  out << "subdomains_per_side " << config_.subdomains_per_side << '\n'
      << "cells_per_subdomain_side " << config_.cells_per_subdomain_side << '\n'
      << "h " << h() << '\n'
      << "vertices " << num_vertices() << '\n'
      << "triangles " << num_triangles() << '\n'
      << "dg_nodes " << num_dg_nodes() << '\n'
      << "edges " << edges_.size() << '\n'
      << "interior_edges " << interior << '\n'
      << "boundary_edges " << edges_.size() - interior << '\n';
}

Mesh build_mesh(const MeshConfig& config) { return Mesh(config); }

std::span<const int> nodes_at_vertex(const Mesh& mesh, int vertex) {
  if (vertex < 0 || static_cast<std::size_t>(vertex) >= mesh.num_vertices()) {
    throw std::out_of_range("nodes_at_vertex: vertex index out of range");
  }
  return mesh.nodes_at_vertex(vertex);
}

}  // namespace dgschwarz
