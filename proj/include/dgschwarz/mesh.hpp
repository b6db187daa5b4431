#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace dgschwarz {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Uniform square grid of subdomains_per_side^2 square subdomains, each made
/// of cells_per_subdomain_side^2 square cells split into two triangles.
struct MeshConfig {
  int subdomains_per_side = 1;
  int cells_per_subdomain_side = 1;

  int cells_per_side() const { return subdomains_per_side * cells_per_subdomain_side; }
  double h() const { return 1.0 / cells_per_side(); }
};

enum class EdgeKind { Interior, Boundary };

struct Edge {
  EdgeKind kind = EdgeKind::Interior;
  int tri_plus = -1;
  int tri_minus = -1;  // -1 on boundary edges
  std::array<int, 2> vertices{};
  /// Local vertex index (0..2) of vertices[0], vertices[1] inside tri_plus / tri_minus.
  std::array<int, 2> local_plus{};
  std::array<int, 2> local_minus{-1, -1};
  double length = 0.0;
  Point normal;  // unit outer normal of tri_plus
};

enum class MirrorAxis { X, Y };

/// DG node id of local vertex `j` of triangle `t`.
constexpr int dg_node(int t, int j) { return 3 * t + j; }

/// Structured triangulation of the unit square. Cell (i, j) holds triangles
/// 2c (below the bottom-left to top-right diagonal) and 2c + 1 (above it),
/// c = j * n + i. Each triangle lists its right-angle vertex first, then
/// the other two counterclockwise.
class Mesh {
 public:
  explicit Mesh(const MeshConfig& config);

  const MeshConfig& config() const { return config_; }
  int cells_per_side() const { return config_.cells_per_side(); }
  double h() const { return config_.h(); }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_dg_nodes() const { return 3 * triangles_.size(); }

  const Point& vertex(int v) const { return vertices_[v]; }
  int vertex_index(int i, int j) const { return j * (cells_per_side() + 1) + i; }
  std::array<int, 2> vertex_grid(int v) const;

  const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
  std::span<const Edge> edges() const { return edges_; }
  /// Edges of triangle t, indexed by the local vertex opposite to them.
  const std::array<int, 3>& triangle_edges(int t) const { return triangle_edges_[t]; }

  /// Grid cell (i, j) containing triangle t.
  std::array<int, 2> cell_of(int t) const;
  bool is_lower(int t) const { return t % 2 == 0; }

  double area(int t) const;
  Point barycenter(int t) const;
  /// Gradients of the three local P1 basis functions (constant on t).
  std::array<Point, 3> basis_gradients(int t) const;

  /// The set nu(x) of DG nodes located at geometric vertex v, ascending.
  std::span<const int> nodes_at_vertex(int v) const;
  /// Geometric vertex of DG node `node`.
  int vertex_of_node(int node) const { return triangles_[node / 3][node % 3]; }

  /// Triangle of the same orientation in the grid cell mirrored across
  /// x = 1/2 or y = 1/2. The diagonal split is not mirror symmetric, so this
  /// maps cells, not exact triangle images.
  int mirror_triangle(int t, MirrorAxis axis) const;

  void write_summary(std::ostream& out) const;

 private:
  MeshConfig config_;
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<std::size_t> vertex_node_offsets_;
  std::vector<int> vertex_nodes_;
};

Mesh build_mesh(const MeshConfig& config);

/// Convenience wrapper for Mesh::nodes_at_vertex with range checking.
std::span<const int> nodes_at_vertex(const Mesh& mesh, int vertex);

}  // namespace dgschwarz
