#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "dgschwarz/coarse.hpp"
#include "dgschwarz/decomp.hpp"
#include "dgschwarz/linalg/cholesky.hpp"
#include "dgschwarz/linalg/sparse.hpp"

namespace dgschwarz {

/// Exact: local blocks of A. Inexact: local blocks of a-hat.
enum class LocalVariant { Exact, Inexact };

struct SchwarzStats {
  std::vector<std::size_t> block_dims;
  std::vector<std::size_t> factor_nnz;
  std::size_t coarse_dim = 0;
};

/// M^{-1} r = sum_k R_k^T B_k^{-1} R_k r + R_0^T A_0^{-1} R_0 r, with B_k the
/// principal block of A (or a-hat) over the dofs of subdomain k.
class AdditiveSchwarz {
 public:
  /// `coarse` may be null (one-level). It must outlive the preconditioner.
  AdditiveSchwarz(const linalg::SparseSym& local_matrix, const Partition& partition, const CoarseSpace* coarse,
                  int workers = 1);

  std::size_t dim() const { return n_; }
  bool has_coarse() const { return coarse_ != nullptr && !coarse_->empty(); }
  void apply(std::span<const double> r, std::span<double> z) const;
  linalg::Vector apply(std::span<const double> r) const;
  SchwarzStats stats() const;
  void write_stats(std::ostream& out) const;

 private:
  std::size_t n_ = 0;
  const std::vector<std::vector<int>>* blocks_ = nullptr;
  std::vector<linalg::SparseCholesky> factors_;
  const CoarseSpace* coarse_ = nullptr;
  int workers_ = 1;
};

AdditiveSchwarz build_preconditioner(const linalg::SparseSym& a, const linalg::SparseSym& a_hat,
                                     const Partition& partition, const CoarseSpace* coarse, LocalVariant variant,
                                     int workers = 1);

}  // namespace dgschwarz
