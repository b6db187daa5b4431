#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "dgschwarz/linalg/cholesky.hpp"
#include "dgschwarz/linalg/eigen.hpp"
#include "dgschwarz/linalg/sparse.hpp"

using namespace dgschwarz::linalg;

namespace {

// 5-point Laplacian on an m x m grid plus a random positive diagonal shift.
SparseSym grid_laplacian(int m, double shift, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, shift);
  std::vector<Triplet> t;
  auto id = [m](int i, int j) { return j * m + i; };
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      t.push_back({id(i, j), id(i, j), 4.0 + u(rng)});
      if (i + 1 < m) {
        t.push_back({id(i, j), id(i + 1, j), -1.0});
        t.push_back({id(i + 1, j), id(i, j), -1.0});
      }
      if (j + 1 < m) {
        t.push_back({id(i, j), id(i, j + 1), -1.0});
        t.push_back({id(i, j + 1), id(i, j), -1.0});
      }
    }
  }
  return SparseSym::from_triplets(static_cast<std::size_t>(m * m), t);
}

Eigen::MatrixXd random_spd(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = g(rng);
  return x * x.transpose() + n * Eigen::MatrixXd::Identity(n, n);
}

Eigen::MatrixXd random_sym(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = g(rng);
  return 0.5 * (x + x.transpose());
}

}  // namespace

TEST_CASE("triplet assembly sums duplicates and keeps rows sorted") {
  std::vector<Triplet> t{{0, 2, 1.0}, {2, 0, 1.0}, {0, 0, 2.0}, {0, 2, 0.5}, {2, 0, 0.5}, {1, 1, 3.0}, {2, 2, 4.0}};
  const SparseSym a = SparseSym::from_triplets(3, t);
  CHECK(a.nnz() == 5);
  CHECK(a.coeff(0, 2) == 1.5);
  CHECK(a.coeff(2, 0) == 1.5);
  CHECK(a.coeff(0, 1) == 0.0);
  CHECK(a.symmetry_defect() == 0.0);
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const auto cols = a.row_cols(i);
    for (std::size_t k = 1; k < cols.size(); ++k) CHECK(cols[k - 1] < cols[k]);
  }
}

TEST_CASE("sparse product matches a naive dense product") {
  const SparseSym a = grid_laplacian(7, 1.0, 3);
  const Eigen::MatrixXd d = a.to_dense();
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector x(a.dim());
  for (double& v : x) v = u(rng);
  const Vector y = spmv(a, x);
  for (std::size_t i = 0; i < a.dim(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.dim(); ++j) s += d(i, j) * x[j];
    CHECK(y[i] == doctest::Approx(s).epsilon(1e-14));
  }
}

TEST_CASE("principal submatrix follows the given index order") {
  const SparseSym a = grid_laplacian(4, 1.0, 5);
  const std::vector<int> idx{5, 1, 4, 9};
  const SparseSym s = a.principal_submatrix(idx);
  REQUIRE(s.dim() == idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) CHECK(s.coeff(i, j) == a.coeff(idx[i], idx[j]));
}

TEST_CASE("matrix market round trip is exact") {
  const SparseSym a = grid_laplacian(5, 0.3, 11);
  std::stringstream ss;
  write_matrix_market(ss, a);
  const SparseSym b = read_matrix_market(ss);
  REQUIRE(b.dim() == a.dim());
  REQUIRE(b.nnz() == a.nnz());
  for (std::size_t k = 0; k < a.nnz(); ++k) CHECK(a.values()[k] == b.values()[k]);
}

TEST_CASE("sparse cholesky solves and reconstructs") {
  const SparseSym a = grid_laplacian(12, 0.5, 17);
  const Eigen::MatrixXd d = a.to_dense();
  for (Ordering ord : {Ordering::Natural, Ordering::Amd}) {
    const SparseCholesky f(a, ord);
    CHECK((f.reconstruct_dense() - d).cwiseAbs().maxCoeff() < 1e-12);
    Vector b(a.dim());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::sin(0.3 * static_cast<double>(i));
    const Vector x = f.solve(b);
    Vector r = spmv(a, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    CHECK(norm2(r) <= 1e-12 * norm2(b));
  }
  CHECK(SparseCholesky(a, Ordering::Amd).factor_nnz() <= SparseCholesky(a, Ordering::Natural).factor_nnz());
}

TEST_CASE("cholesky rejects an indefinite matrix and names the pivot") {
  std::vector<Triplet> t{{0, 0, 1.0}, {1, 1, 1.0}, {0, 1, 2.0}, {1, 0, 2.0}, {2, 2, 1.0}};
  const SparseSym a = SparseSym::from_triplets(3, t);
  CHECK_THROWS_AS(SparseCholesky(a, Ordering::Natural), NotPositiveDefinite);
  try {
    SparseCholesky f(a, Ordering::Natural);
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.pivot() == 1);
  }
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 2, 1;
  CHECK_THROWS_AS(DenseCholesky{m}, NotPositiveDefinite);
}

TEST_CASE("pivoted cholesky finds the rank of a gram matrix") {
  std::mt19937 rng(23);
  std::normal_distribution<double> g;
  Eigen::MatrixXd v(20, 6);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 20; ++i) v(i, j) = g(rng);
  v.col(4) = v.col(0) - 2.0 * v.col(2);
  v.col(5) = 0.5 * v.col(1) + v.col(3);
  const auto r = pivoted_cholesky_rank(v.transpose() * v, 1e-12);
  CHECK(r.kept.size() == 4);
  CHECK(r.dropped.size() == 2);
}

TEST_CASE("tridiagonal eigenvalues of the 1d laplacian") {
  const int n = 40;
  std::vector<double> d(n, 2.0), e(n - 1, -1.0);
  const Eigen::VectorXd ev = tridiagonal_eigenvalues(d, e);
  for (int k = 1; k <= n; ++k) {
    const double exact = 2.0 - 2.0 * std::cos(k * std::numbers::pi / (n + 1));
    CHECK(ev[k - 1] == doctest::Approx(exact).epsilon(1e-12));
  }
  // The last eigenvector components are sqrt(2/(n+1)) sin(n k pi/(n+1)).
  const auto spec = tridiagonal_spectrum(d, e);
  for (int k = 1; k <= n; ++k) {
    const double s = std::sqrt(2.0 / (n + 1)) * std::sin(n * k * std::numbers::pi / (n + 1));
    CHECK(std::abs(spec.last_components[k - 1]) == doctest::Approx(std::abs(s)).epsilon(1e-10));
  }
}

TEST_CASE("generalized eigenpairs: residual, orthonormality, order") {
  const int n = 30;
  const Eigen::MatrixXd a = random_sym(n, 31);
  const Eigen::MatrixXd b = random_spd(n, 37);
  const auto r = sym_eig_generalized(a, b);
  const double scale = a.norm() + b.norm();
  for (int j = 0; j < n; ++j) {
    const Eigen::VectorXd res = a * r.vectors.col(j) - r.values[j] * b * r.vectors.col(j);
    CHECK(res.norm() <= 1e-10 * scale);
    if (j > 0) CHECK(r.values[j - 1] <= r.values[j]);
  }
  const Eigen::MatrixXd g = r.vectors.transpose() * b * r.vectors;
  CHECK((g - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
  // Independent invariant: the eigenvalue sum is trace(B^{-1} A).
  const double tr = b.partialPivLu().solve(a).trace();
  CHECK(r.values.sum() == doctest::Approx(tr).epsilon(1e-10));
}

TEST_CASE("generalized eigenvalues annihilate det(A - lambda B)") {
  const int n = 5;
  const Eigen::MatrixXd a = random_sym(n, 41);
  const Eigen::MatrixXd b = random_spd(n, 43);
  const auto r = sym_eig_generalized(a, b);
  // det(A - mu B) changes sign across every simple eigenvalue.
  for (int j = 0; j < n; ++j) {
    const double lam = r.values[j];
    const double d = 1e-6 * (1.0 + std::abs(lam));
    const double lo = (a - (lam - d) * b).determinant();
    const double hi = (a - (lam + d) * b).determinant();
    CHECK(lo * hi < 0.0);
  }
}

TEST_CASE("standard eigenvalues match the characteristic trace identities") {
  const Eigen::MatrixXd a = random_sym(12, 47);
  const Eigen::VectorXd ev = sym_eigenvalues(a);
  CHECK(ev.sum() == doctest::Approx(a.trace()).epsilon(1e-12));
  CHECK(ev.squaredNorm() == doctest::Approx(a.squaredNorm()).epsilon(1e-12));
  const auto full = sym_eig(a);
  CHECK((full.vectors.transpose() * full.vectors - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-12);
}
