#include "dgschwarz/sipg.hpp"

#include <cmath>
#include <stdexcept>

namespace dgschwarz {

EdgeWeights edge_weights(double alpha_plus, double alpha_minus, double edge_length) {
  EdgeWeights w;
  if (alpha_minus < 0.0) {
    w.omega_plus = 1.0;
    w.omega_minus = 0.0;
    w.scaled_penalty = alpha_plus;
    w.penalty = alpha_plus / edge_length;
    return w;
  }
  const double lo = std::min(alpha_plus, alpha_minus);
  const double hi = std::max(alpha_plus, alpha_minus);
  // The weight on the larger coefficient is the smaller one; the other is its
  // complement so that the two add up to one in floating point.
  const double small = lo / (alpha_plus + alpha_minus);
  if (alpha_plus >= alpha_minus) {
    w.omega_plus = small;
    w.omega_minus = 1.0 - small;
  } else {
    w.omega_minus = small;
    w.omega_plus = 1.0 - small;
  }
  // 2 lo hi / (lo + hi), ordered so rounding keeps it inside [lo, 2 lo].
  w.scaled_penalty = 2.0 * lo * (hi / (lo + hi));
  w.penalty = w.scaled_penalty / edge_length;
  return w;
}

EdgeWeights edge_weights(const Mesh& mesh, const Edge& edge, const CoefficientField& field) {
  const double am = edge.tri_minus >= 0 ? field[edge.tri_minus] : -1.0;
  (void)mesh;
  return edge_weights(field[edge.tri_plus], am, edge.length);
}

namespace element {

Matrix3 stiffness(const Mesh& mesh, int t, double alpha) {
  const auto g = mesh.basis_gradients(t);
  const double s = alpha * mesh.area(t);
  Matrix3 k{};
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      k[i][j] = s * (g[i].x * g[j].x + g[i].y * g[j].y);
      k[j][i] = k[i][j];
    }
  }
  return k;
}

Matrix3 mass(const Mesh& mesh, int t, double alpha) {
  const double s = alpha * mesh.area(t) / 12.0;
  Matrix3 m{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m[i][j] = i == j ? 2.0 * s : s;
  }
  return m;
}

namespace {

// Two-point Gauss rule on [0, 1].
constexpr std::array<double, 2> kGaussS{0.5 - 0.28867513459481287, 0.5 + 0.28867513459481287};

struct EdgeTraces {
  int size = 3;
  std::array<int, 6> nodes{};
  // Signed trace of each node's basis function at the two Gauss points.
  std::array<std::array<double, 6>, 2> jump{};
};

EdgeTraces edge_traces(const Edge& e) {
  EdgeTraces tr;
  tr.size = e.tri_minus >= 0 ? 6 : 3;
  for (int j = 0; j < 3; ++j) tr.nodes[j] = dg_node(e.tri_plus, j);
  if (e.tri_minus >= 0) {
    for (int j = 0; j < 3; ++j) tr.nodes[3 + j] = dg_node(e.tri_minus, j);
  }
  for (int q = 0; q < 2; ++q) {
    const double s = kGaussS[q];
    tr.jump[q][e.local_plus[0]] = 1.0 - s;
    tr.jump[q][e.local_plus[1]] = s;
    if (e.tri_minus >= 0) {
      tr.jump[q][3 + e.local_minus[0]] = -(1.0 - s);
      tr.jump[q][3 + e.local_minus[1]] = -s;
    }
  }
  return tr;
}

}  // namespace

EdgeBlock jump_jump(const Mesh& mesh, const Edge& edge, double factor) {
  (void)mesh;
  const EdgeTraces tr = edge_traces(edge);
  EdgeBlock b;
  b.size = tr.size;
  b.nodes = tr.nodes;
  const double w = 0.5 * edge.length * factor;
  for (int i = 0; i < tr.size; ++i) {
    for (int j = i; j < tr.size; ++j) {
      b.m[i][j] = w * (tr.jump[0][i] * tr.jump[0][j] + tr.jump[1][i] * tr.jump[1][j]);
      b.m[j][i] = b.m[i][j];
    }
  }
  return b;
}

}  // namespace element

namespace {

void push_block(std::vector<linalg::Triplet>& out, const element::EdgeBlock& b) {
  for (int i = 0; i < b.size; ++i) {
    for (int j = 0; j < b.size; ++j) out.push_back({b.nodes[i], b.nodes[j], b.m[i][j]});
  }
}

void push_volume(std::vector<linalg::Triplet>& out, const Mesh& mesh, const CoefficientField& field) {
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const auto k = element::stiffness(mesh, t, field[t]);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) out.push_back({dg_node(t, i), dg_node(t, j), k[i][j]});
    }
  }
}

// Edge matrix of -({a grad u}, [v]) - ({a grad v}, [u]) + gamma (S_h [u], [v]).
element::EdgeBlock sipg_edge(const Mesh& mesh, const Edge& e, const CoefficientField& field, double gamma,
                             bool consistency) {
  const EdgeWeights w = edge_weights(mesh, e, field);
  element::EdgeBlock b = element::jump_jump(mesh, e, gamma * w.penalty);
  if (!consistency) return b;

  // Weighted normal flux of each basis function (constant along the edge).
  std::array<double, 6> flux{};
  const auto gp = mesh.basis_gradients(e.tri_plus);
  const double cp = w.omega_plus * field[e.tri_plus];
  for (int j = 0; j < 3; ++j) flux[j] = cp * (gp[j].x * e.normal.x + gp[j].y * e.normal.y);
  if (e.tri_minus >= 0) {
    const auto gm = mesh.basis_gradients(e.tri_minus);
    const double cm = w.omega_minus * field[e.tri_minus];
    for (int j = 0; j < 3; ++j) flux[3 + j] = cm * (gm[j].x * e.normal.x + gm[j].y * e.normal.y);
  }
  // Integral of the jump of each basis function: the trace is linear, so the
  // midpoint value times the length is exact.
  std::array<double, 6> jump_int{};
  jump_int[e.local_plus[0]] = 0.5 * e.length;
  jump_int[e.local_plus[1]] = 0.5 * e.length;
  if (e.tri_minus >= 0) {
    jump_int[3 + e.local_minus[0]] = -0.5 * e.length;
    jump_int[3 + e.local_minus[1]] = -0.5 * e.length;
  }
  for (int i = 0; i < b.size; ++i) {
    for (int j = i; j < b.size; ++j) {
      const double c = flux[i] * jump_int[j] + flux[j] * jump_int[i];
      b.m[i][j] = b.m[i][j] - c;
      b.m[j][i] = b.m[i][j];
    }
  }
  return b;
}

linalg::SparseSym assemble_form(const Mesh& mesh, const CoefficientField& field, double gamma, bool consistency) {
  if (field.size() != mesh.num_triangles()) {
    throw std::invalid_argument("assemble: coefficient field does not match the mesh");
  }
  std::vector<linalg::Triplet> triplets;
  triplets.reserve(9 * mesh.num_triangles() + 36 * mesh.edges().size());
  push_volume(triplets, mesh, field);
  for (const Edge& e : mesh.edges()) push_block(triplets, sipg_edge(mesh, e, field, gamma, consistency));
  return linalg::SparseSym::from_triplets(mesh.num_dg_nodes(), triplets);
}

}  // namespace

AssembledSystem assemble(const Mesh& mesh, const CoefficientField& field, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("assemble: penalty gamma must be positive");
  AssembledSystem sys;
  sys.gamma = gamma;
  sys.a = assemble_form(mesh, field, gamma, true);
  sys.a_hat = assemble_form(mesh, field, 1.0, false);
  sys.rhs.assign(mesh.num_dg_nodes(), 0.0);
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const double v = mesh.area(t) / 3.0;
    for (int j = 0; j < 3; ++j) sys.rhs[dg_node(t, j)] = v;
  }
  return sys;
}

linalg::SparseSym assemble_hat(const Mesh& mesh, const CoefficientField& field) {
  return assemble_form(mesh, field, 1.0, false);
}

}  // namespace dgschwarz
