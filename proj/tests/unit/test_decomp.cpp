#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "dgschwarz/decomp.hpp"

using namespace dgschwarz;

namespace {

bool contains(const std::vector<int>& sorted, int x) { return std::binary_search(sorted.begin(), sorted.end(), x); }

// Interface vertices recomputed from the cell grid: all grid vertices on the
// shared side of the two subdomain squares.
std::set<int> shared_side_vertices(const Mesh& m, int ns, int nc, int k, int l) {
  const int ki = k % ns, kj = k / ns, li = l % ns, lj = l / ns;
  std::set<int> out;
  if (kj == lj) {
    const int i = std::max(ki, li) * nc;
    for (int j = kj * nc; j <= (kj + 1) * nc; ++j) out.insert(m.vertex_index(i, j));
  } else {
    const int j = std::max(kj, lj) * nc;
    for (int i = ki * nc; i <= (ki + 1) * nc; ++i) out.insert(m.vertex_index(i, j));
  }
  return out;
}

}  // namespace

TEST_CASE("counts for the large decomposition") {
  const Mesh m(MeshConfig{8, 16});
  const Partition p = build_partition(m);
  CHECK(m.num_triangles() == 32768);
  CHECK(p.patches.size() == 112);
  CHECK(p.interfaces.size() == 112);
  CHECK(p.crosspoints.size() == 49);
  int both = 0;
  for (const auto& patch : p.patches) both += patch.crosspoint_endpoints.size() == 2;
  CHECK(both == 2 * 7 * 6);
}

TEST_CASE("a single subdomain has no interfaces") {
  const Mesh m(MeshConfig{1, 6});
  const Partition p = build_partition(m);
  CHECK(p.interfaces.empty());
  CHECK(p.patches.empty());
  CHECK(p.crosspoints.empty());
  CHECK(p.maps.interior_dofs[0].size() == m.num_dg_nodes());
}

TEST_CASE("2x2 decomposition: four patches sharing the centre crosspoint") {
  const Mesh m(MeshConfig{2, 4});
  const Partition p = build_partition(m);
  REQUIRE(p.patches.size() == 4);
  REQUIRE(p.crosspoints.size() == 1);
  CHECK(p.crosspoints[0] == m.vertex_index(4, 4));
  for (const auto& patch : p.patches) {
    REQUIRE(patch.crosspoint_endpoints.size() == 1);
    CHECK(patch.crosspoint_endpoints[0] == p.crosspoints[0]);
  }
}

TEST_CASE("n_c = 1 with three subdomains per side has empty patches") {
  CHECK_THROWS_AS(build_partition(Mesh(MeshConfig{3, 1})), std::invalid_argument);
  CHECK_NOTHROW(build_partition(Mesh(MeshConfig{2, 1})));
}

TEST_CASE("interfaces, patches and layers against brute-force geometry") {
  for (auto [ns, nc] : std::vector<std::pair<int, int>>{{2, 3}, {3, 4}, {4, 2}}) {
    const Mesh m(MeshConfig{ns, nc});
    const Partition p = build_partition(m);
    CHECK(p.interfaces.size() == static_cast<std::size_t>(2 * ns * (ns - 1)));
    const std::set<int> xp(p.crosspoints.begin(), p.crosspoints.end());

    for (std::size_t q = 0; q < p.interfaces.size(); ++q) {
      const Interface& iface = p.interfaces[q];
      const Patch& patch = p.patches[q];
      CHECK(iface.k < iface.l);
      CHECK(iface.edges.size() == static_cast<std::size_t>(nc));
      for (int e : iface.edges) {
        const Edge& edge = m.edges()[e];
        const std::set<int> sides{p.subdomain_of[edge.tri_plus], p.subdomain_of[edge.tri_minus]};
        CHECK(sides == std::set<int>{iface.k, iface.l});
      }

      std::set<int> open;
      for (int v : shared_side_vertices(m, ns, nc, iface.k, iface.l)) {
        if (!xp.count(v)) open.insert(v);
      }
      CHECK(open == std::set<int>(iface.open_vertices.begin(), iface.open_vertices.end()));

      // Patch: exactly the triangles touching an open interface vertex.
      for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
        const auto& tri = m.triangle(t);
        const bool touches = open.count(tri[0]) || open.count(tri[1]) || open.count(tri[2]);
        CHECK(touches == contains(patch.triangles, t));
      }
      for (int t : patch.triangles_k) CHECK(p.subdomain_of[t] == iface.k);
      for (int t : patch.triangles_l) CHECK(p.subdomain_of[t] == iface.l);
      CHECK(patch.triangles_k.size() + patch.triangles_l.size() == patch.triangles.size());

      // Free and constrained nodes split the patch nodes.
      CHECK(patch.nodes.size() == 3 * patch.triangles.size());
      CHECK(patch.free_nodes.size() + patch.constrained_nodes.size() == patch.nodes.size());
      for (int node : patch.constrained_nodes) CHECK(!contains(patch.free_nodes, node));
      for (int node : patch.constrained_nodes) {
        const int v = m.vertex_of_node(node);
        const bool at_xp = std::find(patch.crosspoint_endpoints.begin(), patch.crosspoint_endpoints.end(), v) !=
                           patch.crosspoint_endpoints.end();
        CHECK((at_xp || contains(patch.shared_corner_nodes, node)));
      }
      // Shared-corner nodes sit next to one of the patch's crosspoints.
      for (int node : patch.shared_corner_nodes) {
        const auto [vi, vj] = m.vertex_grid(m.vertex_of_node(node));
        bool near = false;
        for (int c : patch.crosspoint_endpoints) {
          const auto [ci, cj] = m.vertex_grid(c);
          near = near || (std::abs(vi - ci) <= 1 && std::abs(vj - cj) <= 1);
        }
        CHECK(near);
      }
      // Owned edges: both sides in the patch, or on the domain boundary.
      for (int e : patch.owned_edges) {
        const Edge& edge = m.edges()[e];
        CHECK(contains(patch.triangles, edge.tri_plus));
        if (edge.kind == EdgeKind::Interior) CHECK(contains(patch.triangles, edge.tri_minus));
      }
    }

    // Layers are the union of subpatches and live inside their subdomain.
    std::vector<char> brute(m.num_triangles(), 0);
    for (const auto& patch : p.patches)
      for (int t : patch.triangles) brute[t] = 1;
    CHECK(brute == p.in_layer);
    for (int k = 0; k < p.num_subdomains(); ++k) {
      for (int t : p.layers[k]) {
        CHECK(p.subdomain_of[t] == k);
        CHECK(p.in_layer[t] == 1);
      }
    }

    // Subdomain dofs partition all nodes; interior dofs are the non-layer ones.
    std::vector<int> owner(m.num_dg_nodes(), -1);
    for (int k = 0; k < p.num_subdomains(); ++k) {
      CHECK(std::is_sorted(p.maps.subdomain_dofs[k].begin(), p.maps.subdomain_dofs[k].end()));
      for (int node : p.maps.subdomain_dofs[k]) {
        CHECK(owner[node] == -1);
        owner[node] = k;
      }
      std::size_t layer = 0;
      for (int node : p.maps.subdomain_dofs[k]) layer += p.maps.layer_node[node];
      CHECK(layer + p.maps.interior_dofs[k].size() == p.maps.subdomain_dofs[k].size());
      for (int node : p.maps.interior_dofs[k]) CHECK(p.maps.layer_node[node] == 0);
    }
    CHECK(std::count(owner.begin(), owner.end(), -1) == 0);
  }
}

TEST_CASE("shared corner nodes appear only where interfaces meet") {
  const Mesh m(MeshConfig{3, 4});
  const Partition p = build_partition(m);
  for (const auto& patch : p.patches) {
    if (patch.crosspoint_endpoints.empty()) CHECK(patch.shared_corner_nodes.empty());
    else CHECK(!patch.shared_corner_nodes.empty());
  }
  std::ostringstream out;
  write_partition_summary(out, p);
  CHECK(out.str().find("interfaces 12") != std::string::npos);
}
