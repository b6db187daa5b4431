#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dgschwarz/linalg/sparse.hpp"

namespace dgschwarz::linalg {

/// Thrown when a Cholesky factorization meets a non-positive pivot.
class NotPositiveDefinite : public std::runtime_error {
 public:
  NotPositiveDefinite(const std::string& what, std::size_t pivot)
      : std::runtime_error(what), pivot_(pivot) {}
  /// Row of the input matrix (original numbering) at which the pivot failed.
  std::size_t pivot() const { return pivot_; }

 private:
  std::size_t pivot_;
};

enum class Ordering { Natural, Amd };

/// Sparse Cholesky factor P A P^T = L L^T. The symbolic pattern comes from the
/// elimination tree; the numeric phase is the up-looking row algorithm.
class SparseCholesky {
 public:
  SparseCholesky() = default;
  explicit SparseCholesky(const SparseSym& a, Ordering ordering = Ordering::Amd);

  std::size_t dim() const { return n_; }
  std::size_t factor_nnz() const { return li_.size(); }

  Vector solve(std::span<const double> b) const;
  void solve_in_place(std::span<double> x) const;

  /// perm[k] is the original index placed at position k.
  std::span<const int> permutation() const { return perm_; }

  /// Column-compressed lower factor (diagonal first in every column).
  std::span<const std::size_t> column_offsets() const { return lp_; }
  std::span<const int> row_indices() const { return li_; }
  std::span<const double> factor_values() const { return lx_; }

  /// P^T L L^T P as a dense matrix; intended for small verification problems.
  Eigen::MatrixXd reconstruct_dense() const;

 private:
  std::size_t n_ = 0;
  std::vector<int> perm_;
  std::vector<std::size_t> lp_;
  std::vector<int> li_;
  std::vector<double> lx_;
};

SparseCholesky chol_factor(const SparseSym& a, Ordering ordering = Ordering::Amd);
Vector chol_solve(const SparseCholesky& factor, std::span<const double> b);

/// Dense SPD factorization with the same error contract as the sparse one.
class DenseCholesky {
 public:
  DenseCholesky() = default;
  explicit DenseCholesky(const Eigen::MatrixXd& a);

  std::size_t dim() const { return static_cast<std::size_t>(llt_.rows()); }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return llt_.solve(b); }
  Eigen::MatrixXd matrix_l() const { return llt_.matrixL(); }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

struct PivotedCholeskyResult {
  std::vector<int> kept;     // accepted pivots, ascending
  std::vector<int> dropped;  // rejected pivots, ascending
  double max_pivot = 0.0;
};

/// Diagonally pivoted Cholesky used for rank filtering: pivots below
/// `relative_tol * max_pivot` end the factorization and the remaining rows
/// are reported as dependent.
PivotedCholeskyResult pivoted_cholesky_rank(const Eigen::MatrixXd& a, double relative_tol);

}  // namespace dgschwarz::linalg
