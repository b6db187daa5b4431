#include "dgschwarz/linalg/cholesky.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>

namespace dgschwarz::linalg {

namespace {

std::vector<int> amd_permutation(const SparseSym& a) {
  const auto n = static_cast<Eigen::Index>(a.dim());
  std::vector<Eigen::Triplet<double, int>> t;
  t.reserve(a.nnz());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (int j : a.row_cols(i)) t.emplace_back(static_cast<int>(i), j, 1.0);
  }
  Eigen::SparseMatrix<double, Eigen::ColMajor, int> pattern(n, n);
  pattern.setFromTriplets(t.begin(), t.end());
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p;
  Eigen::AMDOrdering<int> amd;
  amd(pattern, p);
  return {p.indices().data(), p.indices().data() + p.indices().size()};
}

// Nonzero pattern of row k of L, returned in s[top..n) in topological order.
std::size_t ereach(std::span<const std::size_t> cp, std::span<const int> ci, int k,
                   std::span<const int> parent, std::span<int> s, std::span<char> marked) {
  const auto n = s.size();
  std::size_t top = n;
  marked[k] = 1;
  for (std::size_t p = cp[k]; p < cp[k + 1]; ++p) {
    int i = ci[p];
    if (i > k) continue;
    std::size_t len = 0;
    for (; !marked[i]; i = parent[i]) {
      s[len++] = i;
      marked[i] = 1;
    }
    while (len > 0) s[--top] = s[--len];
  }
  for (std::size_t p = top; p < n; ++p) marked[s[p]] = 0;
  marked[k] = 0;
  return top;
}

}  // namespace

SparseCholesky::SparseCholesky(const SparseSym& a, Ordering ordering) : n_(a.dim()) {
  const auto n = static_cast<int>(n_);
  if (ordering == Ordering::Amd && n_ > 0) {
    perm_ = amd_permutation(a);
  } else {
    perm_.resize(n_);
    std::iota(perm_.begin(), perm_.end(), 0);
  }
  std::vector<int> pinv(n_);
  for (int k = 0; k < n; ++k) pinv[perm_[k]] = k;

  // Upper triangle of C = P A P^T, column-compressed.
  std::vector<std::size_t> cp(n_ + 1, 0);
  std::vector<int> ci;
  std::vector<double> cx;
  ci.reserve(a.nnz() / 2 + n_);
  cx.reserve(a.nnz() / 2 + n_);
  for (int k = 0; k < n; ++k) {
    const auto row = static_cast<std::size_t>(perm_[k]);
    auto cols = a.row_cols(row);
    auto vals = a.row_values(row);
    std::vector<std::pair<int, double>> entries;
    entries.reserve(cols.size());
    for (std::size_t p = 0; p < cols.size(); ++p) {
      const int i = pinv[cols[p]];
      if (i <= k) entries.emplace_back(i, vals[p]);
    }
    std::sort(entries.begin(), entries.end());
    for (const auto& [i, v] : entries) {
      ci.push_back(i);
      cx.push_back(v);
    }
    cp[k + 1] = ci.size();
  }

  // Elimination tree.
  std::vector<int> parent(n_, -1), ancestor(n_, -1);
  for (int k = 0; k < n; ++k) {
    for (std::size_t p = cp[k]; p < cp[k + 1]; ++p) {
      int i = ci[p];
      while (i != -1 && i < k) {
        const int next = ancestor[i];
        ancestor[i] = k;
        if (next == -1) parent[i] = k;
        i = next;
      }
    }
  }

  // Column counts from the row patterns.
  std::vector<int> s(n_);
  std::vector<char> marked(n_, 0);
  std::vector<std::size_t> count(n_, 1);
  for (int k = 0; k < n; ++k) {
    const auto top = ereach(cp, ci, k, parent, s, marked);
    for (std::size_t p = top; p < n_; ++p) ++count[s[p]];
  }
  lp_.assign(n_ + 1, 0);
  for (std::size_t j = 0; j < n_; ++j) lp_[j + 1] = lp_[j] + count[j];
  li_.assign(lp_[n_], 0);
  lx_.assign(lp_[n_], 0.0);

  // Up-looking numeric factorization.
  std::vector<std::size_t> next(lp_.begin(), lp_.end() - 1);
  std::vector<double> x(n_, 0.0);
  for (int k = 0; k < n; ++k) {
    auto top = ereach(cp, ci, k, parent, s, marked);
    x[k] = 0.0;
    for (std::size_t p = cp[k]; p < cp[k + 1]; ++p) x[ci[p]] = cx[p];
    double d = x[k];
    x[k] = 0.0;
    for (; top < n_; ++top) {
      const int i = s[top];
      const double lki = x[i] / lx_[lp_[i]];
      x[i] = 0.0;
      for (std::size_t p = lp_[i] + 1; p < next[i]; ++p) x[li_[p]] -= lx_[p] * lki;
      d -= lki * lki;
      const auto p = next[i]++;
      li_[p] = k;
      lx_[p] = lki;
    }
    if (!(d > 0.0)) {
      throw NotPositiveDefinite("matrix is not positive definite (pivot " + std::to_string(k) +
                                    ", original row " + std::to_string(perm_[k]) + ")",
                                static_cast<std::size_t>(perm_[k]));
    }
    const auto p = next[k]++;
    li_[p] = k;
    lx_[p] = std::sqrt(d);
  }
}

void SparseCholesky::solve_in_place(std::span<double> b) const {
  if (b.size() != n_) throw std::invalid_argument("cholesky solve: dimension mismatch");
  std::vector<double> x(n_);
  for (std::size_t k = 0; k < n_; ++k) x[k] = b[perm_[k]];
  for (std::size_t j = 0; j < n_; ++j) {
    x[j] /= lx_[lp_[j]];
    const double xj = x[j];
    for (std::size_t p = lp_[j] + 1; p < lp_[j + 1]; ++p) x[li_[p]] -= lx_[p] * xj;
  }
  for (std::size_t j = n_; j-- > 0;) {
    double xj = x[j];
    for (std::size_t p = lp_[j] + 1; p < lp_[j + 1]; ++p) xj -= lx_[p] * x[li_[p]];
    x[j] = xj / lx_[lp_[j]];
  }
  for (std::size_t k = 0; k < n_; ++k) b[perm_[k]] = x[k];
}

Vector SparseCholesky::solve(std::span<const double> b) const {
  Vector x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

Eigen::MatrixXd SparseCholesky::reconstruct_dense() const {
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t p = lp_[j]; p < lp_[j + 1]; ++p) l(li_[p], static_cast<Eigen::Index>(j)) = lx_[p];
  }
  const Eigen::MatrixXd c = l * l.transpose();
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(perm_[i], perm_[j]) = c(i, j);
  }
  return a;
}

SparseCholesky chol_factor(const SparseSym& a, Ordering ordering) { return SparseCholesky(a, ordering); }

Vector chol_solve(const SparseCholesky& factor, std::span<const double> b) { return factor.solve(b); }

DenseCholesky::DenseCholesky(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("dense cholesky: matrix not square");
  llt_.compute(a);
  if (llt_.info() != Eigen::Success) {
    // Eigen does not expose the failing column; locate it with a plain sweep.
    const auto n = a.rows();
    Eigen::MatrixXd l = a;
    for (Eigen::Index k = 0; k < n; ++k) {
      double d = l(k, k) - l.row(k).head(k).squaredNorm();
      if (!(d > 0.0)) {
        throw NotPositiveDefinite("matrix is not positive definite (pivot " + std::to_string(k) + ")",
                                  static_cast<std::size_t>(k));
      }
      l(k, k) = std::sqrt(d);
      for (Eigen::Index i = k + 1; i < n; ++i) {
        l(i, k) = (l(i, k) - l.row(i).head(k).dot(l.row(k).head(k))) / l(k, k);
      }
    }
    throw NotPositiveDefinite("matrix is not positive definite", static_cast<std::size_t>(n));
  }
}

PivotedCholeskyResult pivoted_cholesky_rank(const Eigen::MatrixXd& a, double relative_tol) {
  const auto n = a.rows();
  PivotedCholeskyResult result;
  if (n == 0) return result;
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd d = a.diagonal();
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  result.max_pivot = d.maxCoeff();
  const double floor = relative_tol * result.max_pivot;

  for (Eigen::Index step = 0; step < n; ++step) {
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!used[j] && (best < 0 || d(j) > d(best))) best = j;
    }
    if (!(d(best) > floor)) break;
    used[best] = 1;
    result.kept.push_back(static_cast<int>(best));
    const double piv = std::sqrt(d(best));
    for (Eigen::Index i = 0; i < n; ++i) {
      if (used[i] && i != best) continue;
      double v = a(i, best);
      for (Eigen::Index q = 0; q < step; ++q) v -= l(i, q) * l(best, q);
      l(i, step) = v / piv;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!used[i]) d(i) -= l(i, step) * l(i, step);
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!used[j]) result.dropped.push_back(static_cast<int>(j));
  }
  std::sort(result.kept.begin(), result.kept.end());
  return result;
}

}  // namespace dgschwarz::linalg
