#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dgschwarz::linalg {

using Vector = std::vector<double>;

struct Triplet {
  int row;
  int col;
  double value;
};

/// Square sparse matrix in compressed-sparse-row form with full (not half)
/// symmetric storage. Column indices within a row are strictly increasing.
class SparseSym {
 public:
  SparseSym() = default;

  /// Sums duplicate entries. Contributions to one (row, col) position are
  /// added in the order they appear in `triplets`, so assembling the mirrored
  /// entry with mirrored contributions gives bit-identical values.
  static SparseSym from_triplets(std::size_t n, std::span<const Triplet> triplets);

  static SparseSym identity(std::size_t n);

  std::size_t dim() const { return n_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> row_offsets() const { return offsets_; }
  std::span<const int> col_indices() const { return cols_; }
  std::span<const double> values() const { return values_; }

  std::span<const int> row_cols(std::size_t i) const {
    return std::span<const int>(cols_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }
  std::span<const double> row_values(std::size_t i) const {
    return std::span<const double>(values_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }

  /// Entry (i, j), zero when structurally absent.
  double coeff(int i, int j) const;

  void multiply(std::span<const double> x, std::span<double> y) const;

  /// Principal submatrix over `indices` (need not be sorted; the order of
  /// `indices` defines the local numbering).
  SparseSym principal_submatrix(std::span<const int> indices) const;

  /// Largest |a_ij - a_ji| over stored entries.
  double symmetry_defect() const;

  double frobenius_norm() const;

  Eigen::MatrixXd to_dense() const;

  /// Dense block A(rows, cols).
  Eigen::MatrixXd dense_block(std::span<const int> rows, std::span<const int> cols) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<int> cols_;
  std::vector<double> values_;
};

/// y = A x with a fixed accumulation order per row.
Vector spmv(const SparseSym& a, std::span<const double> x);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

/// Writes the lower triangle in Matrix Market coordinate/real/symmetric format.
void write_matrix_market(std::ostream& out, const SparseSym& a);
SparseSym read_matrix_market(std::istream& in);

}  // namespace dgschwarz::linalg
