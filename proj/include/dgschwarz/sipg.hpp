#pragma once

#include <array>
#include <vector>

#include "dgschwarz/coeff.hpp"
#include "dgschwarz/linalg/sparse.hpp"
#include "dgschwarz/mesh.hpp"

namespace dgschwarz {

struct EdgeWeights {
  double omega_plus = 1.0;
  double omega_minus = 0.0;
  /// S_h on the edge.
  double penalty = 0.0;
  /// h_e * S_h: the harmonic mean of the two coefficients on interior edges,
  /// the single coefficient on boundary edges.
  double scaled_penalty = 0.0;
};

/// Weights from the two adjacent coefficients. Pass alpha_minus < 0 for a
/// boundary edge.
EdgeWeights edge_weights(double alpha_plus, double alpha_minus, double edge_length);
EdgeWeights edge_weights(const Mesh& mesh, const Edge& edge, const CoefficientField& field);

inline constexpr double kDefaultPenalty = 4.0;

struct AssembledSystem {
  linalg::SparseSym a;
  linalg::SparseSym a_hat;
  linalg::Vector rhs;
  double gamma = kDefaultPenalty;
};

/// SIPG matrix with penalty factor gamma, the consistency-free form a-hat,
/// and the load vector for f = 1. Dirichlet data is zero and imposed weakly.
AssembledSystem assemble(const Mesh& mesh, const CoefficientField& field, double gamma = kDefaultPenalty);
linalg::SparseSym assemble_hat(const Mesh& mesh, const CoefficientField& field);

namespace element {

using Matrix3 = std::array<std::array<double, 3>, 3>;

/// alpha * integral of grad(phi_i) . grad(phi_j) over triangle t.
Matrix3 stiffness(const Mesh& mesh, int t, double alpha);
/// alpha * integral of phi_i phi_j over triangle t.
Matrix3 mass(const Mesh& mesh, int t, double alpha);

/// Nodes touched by an edge: the three nodes of tri_plus followed, on
/// interior edges, by the three nodes of tri_minus.
struct EdgeBlock {
  int size = 3;
  std::array<int, 6> nodes{};
  std::array<std::array<double, 6>, 6> m{};
};

/// factor * integral over the edge of [phi_i][phi_j].
EdgeBlock jump_jump(const Mesh& mesh, const Edge& edge, double factor);

}  // namespace element

}  // namespace dgschwarz
