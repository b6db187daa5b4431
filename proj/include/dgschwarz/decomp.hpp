#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "dgschwarz/mesh.hpp"

namespace dgschwarz {

/// Open interface between subdomains k < l. Subdomain id = sj * N_s + si.
struct Interface {
  int id = 0;
  int k = 0;
  int l = 0;
  bool vertical = false;  // lies on a line x = const
  std::vector<int> edges;
  /// Geometric end vertices (ascending coordinate along the interface).
  std::array<int, 2> endpoints{};
  std::array<bool, 2> endpoint_is_crosspoint{};
  /// Vertices of the open interface: edge endpoints minus crosspoints.
  std::vector<int> open_vertices;
};

struct Patch {
  int interface = 0;
  std::vector<int> triangles;  // ascending
  std::vector<int> triangles_k;
  std::vector<int> triangles_l;
  /// Edges with both triangles in the patch, plus patch edges on the domain boundary.
  std::vector<int> owned_edges;
  std::vector<int> crosspoint_endpoints;
  /// All DG nodes of the patch triangles (ascending), split into the ones
  /// held at zero and the rest.
  std::vector<int> nodes;
  std::vector<int> constrained_nodes;
  std::vector<int> free_nodes;
  /// Subset of constrained_nodes coming from triangles shared with a
  /// neighbouring patch that have an edge on that patch's interface.
  std::vector<int> shared_corner_nodes;
};

struct IndexMaps {
  /// DG nodes of each subdomain (V_k), ascending.
  std::vector<std::vector<int>> subdomain_dofs;
  /// Subdomain nodes on triangles outside the boundary layer (V_{k,0}).
  std::vector<std::vector<int>> interior_dofs;
  /// Free nodes per patch.
  std::vector<std::vector<int>> patch_free_dofs;
  /// Per DG node: 1 when it lies on a boundary-layer triangle.
  std::vector<char> layer_node;
};

struct Partition {
  int subdomains_per_side = 1;
  std::vector<int> subdomain_of;  // per triangle
  std::vector<Interface> interfaces;
  std::vector<int> crosspoints;  // geometric vertex ids, ascending
  std::vector<Patch> patches;    // one per interface, same order
  std::vector<std::vector<int>> layers;  // boundary-layer triangles per subdomain
  std::vector<char> in_layer;            // per triangle
  IndexMaps maps;

  int num_subdomains() const { return subdomains_per_side * subdomains_per_side; }
};

/// Throws when an interior interface would have an empty patch (n_c = 1 with
/// N_s >= 3: both ends of such an interface are crosspoints).
Partition build_partition(const Mesh& mesh);
Patch build_patch(const Mesh& mesh, const Partition& partition, const Interface& iface);

void write_partition_summary(std::ostream& out, const Partition& partition);

}  // namespace dgschwarz
