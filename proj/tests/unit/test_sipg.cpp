#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "dgschwarz/linalg/eigen.hpp"
#include "dgschwarz/sipg.hpp"

using namespace dgschwarz;
using dgschwarz::linalg::Vector;

namespace {

double form(const linalg::SparseSym& a, const Vector& u, const Vector& v) {
  Vector au(a.dim());
  a.multiply(u, au);
  return linalg::dot(au, v);
}

// DG vector holding g evaluated at the vertices of every triangle.
template <class G>
Vector interpolate(const Mesh& m, G g) {
  Vector u(m.num_dg_nodes());
  for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
    for (int j = 0; j < 3; ++j) {
      const Point p = m.vertex(m.triangle(t)[j]);
      u[dg_node(t, j)] = g(p.x, p.y);
    }
  }
  return u;
}

int interior_triangle(const Mesh& m) {
  const int n = m.cells_per_side();
  return 2 * ((n / 2) * n + n / 2);
}

}  // namespace

TEST_CASE("edge weights by hand") {
  const EdgeWeights w = edge_weights(1.0, 3.0, 0.5);
  CHECK(w.omega_plus == 0.75);
  CHECK(w.omega_minus == 0.25);
  CHECK(w.scaled_penalty == 1.5);
  CHECK(w.penalty == 3.0);
  const EdgeWeights b = edge_weights(7.0, -1.0, 0.25);
  CHECK(b.omega_plus == 1.0);
  CHECK(b.omega_minus == 0.0);
  CHECK(b.scaled_penalty == 7.0);
  CHECK(b.penalty == 28.0);
}

TEST_CASE("edge weights: partition of unity and harmonic-mean bounds") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> e(0.0, 6.0);
  for (int i = 0; i < 20000; ++i) {
    const double ap = std::pow(10.0, e(rng)), am = std::pow(10.0, e(rng));
    const EdgeWeights w = edge_weights(ap, am, 1.0);
    CHECK(w.omega_plus + w.omega_minus == 1.0);
    const double lo = std::min(ap, am);
    CHECK(w.scaled_penalty >= lo);
    CHECK(w.scaled_penalty <= 2.0 * lo);
    // The weighted average is the harmonic-type one: omega_+ alpha_+ = omega_- alpha_-.
    CHECK(w.omega_plus * ap == doctest::Approx(w.omega_minus * am).epsilon(1e-12));
  }
}

TEST_CASE("element matrices of a right triangle") {
  const Mesh m(MeshConfig{1, 4});
  const double h = m.h();
  for (int t : {0, 1, 9}) {
    const auto k = element::stiffness(m, t, 2.0);
    const double ref[3][3] = {{2, -1, -1}, {-1, 1, 0}, {-1, 0, 1}};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(k[i][j] == doctest::Approx(ref[i][j]).epsilon(1e-13));
    const auto ms = element::mass(m, t, 3.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(ms[i][j] == doctest::Approx(3.0 * h * h / 24.0 * (i == j ? 2 : 1)));
  }
}

TEST_CASE("jump blocks vanish on constants inside and integrate traces on the boundary") {
  const Mesh m(MeshConfig{2, 3});
  for (const Edge& e : m.edges()) {
    const auto b = element::jump_jump(m, e, 2.0);
    for (int i = 0; i < b.size; ++i) {
      double row = 0.0;
      for (int j = 0; j < b.size; ++j) row += b.m[i][j];
      if (e.kind == EdgeKind::Interior) {
        CHECK(row == doctest::Approx(0.0).epsilon(1e-14));
      } else {
        const int local = i;
        const bool on_edge = local == e.local_plus[0] || local == e.local_plus[1];
        CHECK(row == doctest::Approx(on_edge ? e.length : 0.0).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("assembled matrices are exactly symmetric and the load integrates f = 1") {
  const Mesh m(MeshConfig{2, 4});
  const CoefficientField f = generate(m, preset_spec("crossing_channels", 1e4));
  const AssembledSystem s = assemble(m, f);
  CHECK(s.a.symmetry_defect() == 0.0);
  CHECK(s.a_hat.symmetry_defect() == 0.0);
  double total = 0.0;
  for (double v : s.rhs) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS(assemble(m, f, 0.0));
  CHECK_THROWS(assemble(m, CoefficientField(std::vector<double>(3, 1.0))));
}

TEST_CASE("constants only see the boundary penalty") {
  const Mesh m(MeshConfig{2, 4});
  const CoefficientField f = generate(m, preset_spec("channels_inclusions", 50.0));
  const double gamma = 4.0;
  const AssembledSystem s = assemble(m, f, gamma);
  double expect = 0.0;
  for (const Edge& e : m.edges()) {
    if (e.kind == EdgeKind::Boundary) expect += gamma * f[e.tri_plus];
  }
  const Vector one(m.num_dg_nodes(), 1.0);
  CHECK(form(s.a, one, one) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("continuous functions vanishing on the boundary reproduce the 5-point stencil") {
  // With alpha = 1, jumps vanish and a(u, v) is the conforming P1 energy,
  // which on this triangulation is the 5-point Laplacian on vertex values.
  const Mesh m(MeshConfig{2, 4});
  const int n = m.cells_per_side();
  const CoefficientField f(std::vector<double>(m.num_triangles(), 1.0));
  const AssembledSystem s = assemble(m, f);
  auto gu = [](double x, double y) { return x * (1 - x) * y * (1 - y); };
  auto gv = [](double x, double y) { return std::sin(std::numbers::pi * x) * std::sin(2 * std::numbers::pi * y) * (1 + x); };
  const Vector u = interpolate(m, gu), v = interpolate(m, gv);
  double stencil = 0.0;
  for (int j = 1; j < n; ++j) {
    for (int i = 1; i < n; ++i) {
      const double x = i * m.h(), y = j * m.h(), h = m.h();
      const double lap = 4 * gv(x, y) - gv(x - h, y) - gv(x + h, y) - gv(x, y - h) - gv(x, y + h);
      stencil += gu(x, y) * lap;
    }
  }
  CHECK(form(s.a, u, v) == doctest::Approx(stencil).epsilon(1e-12));
}

TEST_CASE("a single linear bump against a direct evaluation of the bilinear form") {
  // u = x on one interior triangle t, zero elsewhere; neighbours have alpha = 1.
  // The flux terms reduce by the divergence theorem to -2 omega_t alpha_t |t|,
  // and the penalty is gamma * sum_e S_e * integral_e x^2 (Simpson is exact).
  const Mesh m(MeshConfig{2, 4});
  const int t = interior_triangle(m);
  for (double at : {1.0, 5.0, 1e3}) {
    std::vector<double> alpha(m.num_triangles(), 1.0);
    alpha[t] = at;
    const CoefficientField f(alpha);
    const double gamma = 4.0;
    const AssembledSystem s = assemble(m, f, gamma);
    Vector u(m.num_dg_nodes(), 0.0);
    for (int j = 0; j < 3; ++j) u[dg_node(t, j)] = m.vertex(m.triangle(t)[j]).x;

    const double omega_t = 1.0 / (at + 1.0);
    const double area = m.area(t);
    double pen = 0.0;
    for (int e : m.triangle_edges(t)) {
      const Edge& edge = m.edges()[e];
      const double xa = m.vertex(edge.vertices[0]).x, xb = m.vertex(edge.vertices[1]).x;
      const double simpson = edge.length / 6.0 * (xa * xa + 4 * 0.25 * (xa + xb) * (xa + xb) + xb * xb);
      const double sp = 2.0 * at / (at + 1.0);
      pen += gamma * sp / edge.length * simpson;
    }
    const double expect = at * area - 2.0 * omega_t * at * area + pen;
    CHECK(form(s.a, u, u) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(form(s.a_hat, u, u) == doctest::Approx(at * area + pen / gamma).epsilon(1e-12));
  }
}

TEST_CASE("A and A-hat are SPD and spectrally equivalent") {
  const Mesh m(MeshConfig{2, 3});
  for (double contrast : {1.0, 1e3, 1e6}) {
    const CoefficientField f = generate(m, preset_spec("crossing_channels", contrast));
    const AssembledSystem s = assemble(m, f);
    const Eigen::MatrixXd a = s.a.to_dense(), ah = s.a_hat.to_dense();
    CHECK(linalg::sym_eigenvalues(a)[0] > 0.0);
    CHECK(linalg::sym_eigenvalues(ah)[0] > 0.0);
    const Eigen::VectorXd ev = linalg::sym_eig_generalized(a, ah).values;
    CHECK(ev[0] > 0.0);
    // Bounded above and below independently of the contrast.
    CHECK(ev[ev.size() - 1] / ev[0] < 50.0);
  }
}
