#include <cmath>
#include <memory>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "dgschwarz/krylov.hpp"
#include "dgschwarz/schwarz.hpp"
#include "dgschwarz/sipg.hpp"

using namespace dgschwarz;
using linalg::Vector;

namespace {

struct Problem {
  Mesh mesh;
  CoefficientField field;
  AssembledSystem sys;
  Partition partition;
  std::vector<PatchProblem> problems;
  std::unique_ptr<HarmonicExtender> ext;
  CoarseSpace coarse;

  Problem(MeshConfig mc, double contrast, EnrichmentPolicy policy)
      : mesh(mc),
        field(generate(mesh, preset_spec("crossing_channels", contrast))),
        sys(assemble(mesh, field)),
        partition(build_partition(mesh)),
        problems(solve_patch_problems(mesh, field, partition, 2)),
        ext(std::make_unique<HarmonicExtender>(sys.a, partition, 2)) {
    CoarseOptions opt;
    opt.policy = policy;
    opt.workers = 2;
    coarse = build_coarse_space(mesh, partition, sys.a, problems, *ext, opt);
  }
};

Vector random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (double& x : v) x = g(rng);
  return v;
}

double a_inner(const linalg::SparseSym& a, const Vector& x, const Vector& y) {
  return linalg::dot(linalg::spmv(a, x), y);
}

}  // namespace

TEST_CASE("one subdomain: the preconditioner is the exact inverse") {
  const Mesh mesh(MeshConfig{1, 6});
  const CoefficientField f = generate(mesh, preset_spec("three_rings", 1.0));
  const AssembledSystem sys = assemble(mesh, f);
  const Partition p = build_partition(mesh);
  const AdditiveSchwarz m = build_preconditioner(sys.a, sys.a_hat, p, nullptr, LocalVariant::Exact);
  const PcgResult r = pcg(sys.a, sys.rhs, [&](auto rr, auto z) { m.apply(rr, z); }, {1e-10, 50});
  CHECK(r.report.iterations == 1);
  CHECK(r.report.converged);
}

TEST_CASE("apply matches the explicitly assembled preconditioner") {
  const Problem pb(MeshConfig{2, 4}, 1e4, EnrichmentPolicy::fixed(2));
  const AdditiveSchwarz m = build_preconditioner(pb.sys.a, pb.sys.a_hat, pb.partition, &pb.coarse, LocalVariant::Exact, 2);
  const std::size_t n = pb.mesh.num_dg_nodes();
  const Eigen::MatrixXd ad = pb.sys.a.to_dense();

  // sum_k R_k^T A_k^{-1} R_k + R_0^T A_0^{-1} R_0 from dense pieces.
  Eigen::MatrixXd minv = Eigen::MatrixXd::Zero(n, n);
  for (const auto& idx : pb.partition.maps.subdomain_dofs) {
    const std::vector<int> rows(idx.begin(), idx.end());
    const Eigen::MatrixXd blk = ad(rows, rows);
    const Eigen::MatrixXd inv = blk.inverse();
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < rows.size(); ++j) minv(rows[i], rows[j]) += inv(i, j);
  }
  Eigen::MatrixXd r(pb.coarse.dim(), n);
  for (std::size_t i = 0; i < pb.coarse.dim(); ++i) {
    const Vector row = pb.coarse.basis.row_dense(i, n);
    for (std::size_t j = 0; j < n; ++j) r(i, j) = row[j];
  }
  minv += r.transpose() * (r * ad * r.transpose()).inverse() * r;

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector x = random_vector(n, rng);
    const Vector z = m.apply(x);
    const Eigen::VectorXd ref = minv * Eigen::Map<const Eigen::VectorXd>(x.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(z[i] == doctest::Approx(ref[i]).epsilon(1e-8).scale(ref.norm() * 1e-8));
  }
  CHECK_THROWS(m.apply(Vector(n - 1, 0.0)));
}

TEST_CASE("M^{-1} is symmetric positive definite and T is A-self-adjoint") {
  const Problem pb(MeshConfig{3, 4}, 1e6, EnrichmentPolicy::below(0.3));
  for (LocalVariant v : {LocalVariant::Exact, LocalVariant::Inexact}) {
    const AdditiveSchwarz m = build_preconditioner(pb.sys.a, pb.sys.a_hat, pb.partition, &pb.coarse, v, 3);
    std::mt19937_64 rng(42);
    const std::size_t n = m.dim();
    for (int trial = 0; trial < 100; ++trial) {
      const Vector x = random_vector(n, rng), y = random_vector(n, rng);
      const Vector mx = m.apply(x), my = m.apply(y);
      const double xy = linalg::dot(mx, y), yx = linalg::dot(my, x);
      CHECK(std::abs(xy - yx) <= 1e-10 * std::sqrt(linalg::dot(mx, x) * linalg::dot(my, y)));
      CHECK(linalg::dot(mx, x) > 0.0);

      const Vector tx = m.apply(linalg::spmv(pb.sys.a, x)), ty = m.apply(linalg::spmv(pb.sys.a, y));
      const double l = a_inner(pb.sys.a, tx, y), r = a_inner(pb.sys.a, x, ty);
      const double scale = std::sqrt(a_inner(pb.sys.a, tx, x) * a_inner(pb.sys.a, ty, y));
      CHECK(std::abs(l - r) <= 1e-10 * scale);
      CHECK(a_inner(pb.sys.a, tx, x) > 0.0);
    }
  }
}

TEST_CASE("exact and inexact local solves give comparable conditioning") {
  const Problem pb(MeshConfig{2, 5}, 1e4, EnrichmentPolicy::below(0.3));
  double kappa[2];
  int i = 0;
  for (LocalVariant v : {LocalVariant::Exact, LocalVariant::Inexact}) {
    const AdditiveSchwarz m = build_preconditioner(pb.sys.a, pb.sys.a_hat, pb.partition, &pb.coarse, v, 2);
    kappa[i++] = dense_condition_oracle(pb.sys.a, [&](auto r, auto z) { m.apply(r, z); }).kappa;
  }
  CHECK(kappa[1] / kappa[0] < 10.0);
  CHECK(kappa[0] / kappa[1] < 10.0);
}

TEST_CASE("stats describe the blocks") {
  const Problem pb(MeshConfig{2, 3}, 1.0, EnrichmentPolicy::fixed(0));
  const AdditiveSchwarz m(pb.sys.a, pb.partition, &pb.coarse, 1);
  const SchwarzStats s = m.stats();
  std::size_t total = 0;
  for (std::size_t d : s.block_dims) total += d;
  CHECK(total == pb.mesh.num_dg_nodes());
  CHECK(s.coarse_dim == pb.coarse.dim());
  CHECK(m.has_coarse());
  std::ostringstream out;
  m.write_stats(out);
  CHECK(out.str().find("coarse_dim 4") != std::string::npos);
  const AdditiveSchwarz one(pb.sys.a, pb.partition, nullptr, 1);
  CHECK(!one.has_coarse());
  CHECK(one.stats().coarse_dim == 0);
}
