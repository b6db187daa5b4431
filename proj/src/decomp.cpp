#include "dgschwarz/decomp.hpp"

#include <algorithm>
#include <iterator>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace dgschwarz {

namespace {

std::vector<int> edge_interface_map(const Mesh& mesh, const Partition& p) {
  std::vector<int> of(mesh.edges().size(), -1);
  for (const auto& iface : p.interfaces) {
    for (int e : iface.edges) of[e] = iface.id;
  }
  return of;
}

void sort_unique(std::vector<int>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

Patch make_patch(const Mesh& mesh, const Partition& partition, const Interface& iface,
                 const std::vector<int>& edge_iface) {
  Patch patch;
  patch.interface = iface.id;

  auto patch_triangles_of = [&](const Interface& itf) {
    std::vector<int> tris;
    for (int v : itf.open_vertices) {
      for (int node : mesh.nodes_at_vertex(v)) tris.push_back(node / 3);
    }
    sort_unique(tris);
    return tris;
  };

  patch.triangles = patch_triangles_of(iface);
  for (int t : patch.triangles) {
    (partition.subdomain_of[t] == iface.k ? patch.triangles_k : patch.triangles_l).push_back(t);
  }

  for (int t : patch.triangles) {
    for (int e : mesh.triangle_edges(t)) {
      const Edge& edge = mesh.edges()[e];
      if (edge.kind == EdgeKind::Boundary) {
        patch.owned_edges.push_back(e);
        continue;
      }
      const int other = edge.tri_plus == t ? edge.tri_minus : edge.tri_plus;
      if (std::binary_search(patch.triangles.begin(), patch.triangles.end(), other)) patch.owned_edges.push_back(e);
    }
  }
  sort_unique(patch.owned_edges);

  for (int r = 0; r < 2; ++r) {
    if (iface.endpoint_is_crosspoint[r]) patch.crosspoint_endpoints.push_back(iface.endpoints[r]);
  }

  for (int t : patch.triangles) {
    for (int j = 0; j < 3; ++j) {
      const int node = dg_node(t, j);
      patch.nodes.push_back(node);
      const int v = mesh.triangle(t)[j];
      if (std::find(patch.crosspoint_endpoints.begin(), patch.crosspoint_endpoints.end(), v) !=
          patch.crosspoint_endpoints.end()) {
        patch.constrained_nodes.push_back(node);
      }
    }
  }

  // A patch triangle with an edge on another interface whose patch also holds
  // the triangle: its nodes on that edge are fixed at zero.
  for (int t : patch.triangles) {
    for (int e : mesh.triangle_edges(t)) {
      const int q = edge_iface[e];
      if (q < 0 || q == iface.id) continue;
      const Interface& other = partition.interfaces[q];
      const Edge& edge = mesh.edges()[e];
      const bool shared = std::any_of(edge.vertices.begin(), edge.vertices.end(), [&](int v) {
        return std::binary_search(other.open_vertices.begin(), other.open_vertices.end(), v);
      });
      if (!shared) continue;
      for (int j = 0; j < 3; ++j) {
        const int v = mesh.triangle(t)[j];
        if (v == edge.vertices[0] || v == edge.vertices[1]) patch.shared_corner_nodes.push_back(dg_node(t, j));
      }
    }
  }
  sort_unique(patch.shared_corner_nodes);
  patch.constrained_nodes.insert(patch.constrained_nodes.end(), patch.shared_corner_nodes.begin(),
                                 patch.shared_corner_nodes.end());
  sort_unique(patch.constrained_nodes);

  std::set_difference(patch.nodes.begin(), patch.nodes.end(), patch.constrained_nodes.begin(),
                      patch.constrained_nodes.end(), std::back_inserter(patch.free_nodes));
  return patch;
}

}  // namespace

Patch build_patch(const Mesh& mesh, const Partition& partition, const Interface& iface) {
  return make_patch(mesh, partition, iface, edge_interface_map(mesh, partition));
}

Partition build_partition(const Mesh& mesh) {
  const int ns = mesh.config().subdomains_per_side;
  const int nc = mesh.config().cells_per_subdomain_side;
  const int n = mesh.cells_per_side();

  Partition p;
  p.subdomains_per_side = ns;
  p.subdomain_of.resize(mesh.num_triangles());
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const auto [i, j] = mesh.cell_of(t);
    p.subdomain_of[t] = (j / nc) * ns + (i / nc);
  }

  auto is_crosspoint = [&](int v) {
    const auto [i, j] = mesh.vertex_grid(v);
    return i % nc == 0 && j % nc == 0 && i > 0 && i < n && j > 0 && j < n;
  };
  for (int v = 0; v < static_cast<int>(mesh.num_vertices()); ++v) {
    if (is_crosspoint(v)) p.crosspoints.push_back(v);
  }

  std::map<std::pair<int, int>, std::vector<int>> by_pair;
  for (int e = 0; e < static_cast<int>(mesh.edges().size()); ++e) {
    const Edge& edge = mesh.edges()[e];
    if (edge.kind != EdgeKind::Interior) continue;
    const int a = p.subdomain_of[edge.tri_plus];
    const int b = p.subdomain_of[edge.tri_minus];
    if (a != b) by_pair[{std::min(a, b), std::max(a, b)}].push_back(e);
  }
  for (auto& [key, edges] : by_pair) {
    Interface iface;
    iface.id = static_cast<int>(p.interfaces.size());
    iface.k = key.first;
    iface.l = key.second;
    iface.edges = edges;
    const Edge& first = mesh.edges()[edges.front()];
    iface.vertical = mesh.vertex(first.vertices[0]).x == mesh.vertex(first.vertices[1]).x;
    std::vector<int> verts;
    for (int e : edges) {
      verts.push_back(mesh.edges()[e].vertices[0]);
      verts.push_back(mesh.edges()[e].vertices[1]);
    }
    sort_unique(verts);
    // Vertex ids grow with y first, then x, so the sorted list runs along the interface.
    iface.endpoints = {verts.front(), verts.back()};
    for (int r = 0; r < 2; ++r) iface.endpoint_is_crosspoint[r] = is_crosspoint(iface.endpoints[r]);
    for (int v : verts) {
      if (!is_crosspoint(v)) iface.open_vertices.push_back(v);
    }
    p.interfaces.push_back(std::move(iface));
  }

  const auto edge_iface = edge_interface_map(mesh, p);
  p.patches.reserve(p.interfaces.size());
  for (const auto& iface : p.interfaces) {
    p.patches.push_back(make_patch(mesh, p, iface, edge_iface));
    if (p.patches.back().triangles.empty()) {
      throw std::invalid_argument("partition: interface " + std::to_string(iface.k) + "-" + std::to_string(iface.l) +
                                  " has no vertex away from crosspoints; use at least 2 cells per subdomain side");
    }
  }

  p.layers.resize(p.num_subdomains());
  p.in_layer.assign(mesh.num_triangles(), 0);
  for (std::size_t i = 0; i < p.patches.size(); ++i) {
    const Patch& patch = p.patches[i];
    const Interface& iface = p.interfaces[i];
    p.layers[iface.k].insert(p.layers[iface.k].end(), patch.triangles_k.begin(), patch.triangles_k.end());
    p.layers[iface.l].insert(p.layers[iface.l].end(), patch.triangles_l.begin(), patch.triangles_l.end());
    for (int t : patch.triangles) p.in_layer[t] = 1;
  }
  for (auto& layer : p.layers) sort_unique(layer);

  IndexMaps& maps = p.maps;
  maps.subdomain_dofs.resize(p.num_subdomains());
  maps.interior_dofs.resize(p.num_subdomains());
  maps.layer_node.assign(mesh.num_dg_nodes(), 0);
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const int k = p.subdomain_of[t];
    for (int j = 0; j < 3; ++j) {
      const int node = dg_node(t, j);
      maps.subdomain_dofs[k].push_back(node);
      if (p.in_layer[t]) {
        maps.layer_node[node] = 1;
      } else {
        maps.interior_dofs[k].push_back(node);
      }
    }
  }
  for (const auto& patch : p.patches) maps.patch_free_dofs.push_back(patch.free_nodes);
  return p;
}

void write_partition_summary(std::ostream& out, const Partition& p) {
  out << "subdomains " << p.num_subdomains() << '\n'
      << "interfaces " << p.interfaces.size() << '\n'
      << "crosspoints " << p.crosspoints.size() << '\n';
  for (int k = 0; k < p.num_subdomains(); ++k) {
    out << "subdomain " << k << " dofs " << p.maps.subdomain_dofs[k].size() << " interior "
        << p.maps.interior_dofs[k].size() << " layer_triangles " << p.layers[k].size() << '\n';
  }
  for (std::size_t i = 0; i < p.patches.size(); ++i) {
    const Patch& patch = p.patches[i];
    const Interface& iface = p.interfaces[i];
    out << "patch " << i << " (" << iface.k << ',' << iface.l << ") triangles " << patch.triangles.size()
        << " owned_edges " << patch.owned_edges.size() << " crosspoints " << patch.crosspoint_endpoints.size()
        << " constrained " << patch.constrained_nodes.size() << " shared_corner " << patch.shared_corner_nodes.size()
        << " free " << patch.free_nodes.size() << '\n';
  }
}

}  // namespace dgschwarz
