#include "dgschwarz/schwarz.hpp"

#include <ostream>
#include <stdexcept>
#include <string>

#include "dgschwarz/parallel.hpp"

namespace dgschwarz {

AdditiveSchwarz::AdditiveSchwarz(const linalg::SparseSym& local_matrix, const Partition& partition,
                                 const CoarseSpace* coarse, int workers)
    : n_(local_matrix.dim()),
      blocks_(&partition.maps.subdomain_dofs),
      factors_(partition.maps.subdomain_dofs.size()),
      coarse_(coarse),
      workers_(workers) {
  parallel_for(
      factors_.size(),
      [&](std::size_t k) {
        try {
          factors_[k] = linalg::SparseCholesky(local_matrix.principal_submatrix((*blocks_)[k]));
        } catch (const linalg::NotPositiveDefinite& e) {
          throw std::runtime_error("schwarz: block of subdomain " + std::to_string(k) + " is not SPD (" + e.what() +
                                   ")");
        }
      },
      workers);
}

void AdditiveSchwarz::apply(std::span<const double> r, std::span<double> z) const {
  if (r.size() != n_ || z.size() != n_) throw std::invalid_argument("schwarz: vector length mismatch");
  // Subdomain dof sets are disjoint, so each local solve owns its slice of z.
  parallel_for(
      factors_.size(),
      [&](std::size_t k) {
        const auto& idx = (*blocks_)[k];
        linalg::Vector x(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) x[i] = r[idx[i]];
        factors_[k].solve_in_place(x);
        for (std::size_t i = 0; i < idx.size(); ++i) z[idx[i]] = x[i];
      },
      workers_);
  if (has_coarse()) coarse_->apply_add(r, z);
}

linalg::Vector AdditiveSchwarz::apply(std::span<const double> r) const {
  linalg::Vector z(n_, 0.0);
  apply(r, z);
  return z;
}

SchwarzStats AdditiveSchwarz::stats() const {
  SchwarzStats s;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    s.block_dims.push_back((*blocks_)[k].size());
    s.factor_nnz.push_back(factors_[k].factor_nnz());
  }
  s.coarse_dim = has_coarse() ? coarse_->dim() : 0;
  return s;
}

void AdditiveSchwarz::write_stats(std::ostream& out) const {
  const SchwarzStats s = stats();
  for (std::size_t k = 0; k < s.block_dims.size(); ++k) {
    out << "block " << k << " dim " << s.block_dims[k] << " factor_nnz " << s.factor_nnz[k] << '\n';
  }
  out << "coarse_dim " << s.coarse_dim << '\n';
}

AdditiveSchwarz build_preconditioner(const linalg::SparseSym& a, const linalg::SparseSym& a_hat,
                                     const Partition& partition, const CoarseSpace* coarse, LocalVariant variant,
                                     int workers) {
  return AdditiveSchwarz(variant == LocalVariant::Exact ? a : a_hat, partition, coarse, workers);
}

}  // namespace dgschwarz
