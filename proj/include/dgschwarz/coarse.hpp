#pragma once

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dgschwarz/coeff.hpp"
#include "dgschwarz/decomp.hpp"
#include "dgschwarz/linalg/cholesky.hpp"
#include "dgschwarz/linalg/sparse.hpp"
#include "dgschwarz/mesh.hpp"
#include "dgschwarz/parallel.hpp"

namespace dgschwarz {

/// Dense patch forms. `*_full` matrices are indexed by patch.nodes; the
/// blocks are restricted to the free nodes (rows) and constrained nodes.
struct PatchForms {
  Eigen::MatrixXd a_full;
  Eigen::MatrixXd b_full;
  Eigen::MatrixXd a;     // free x free
  Eigen::MatrixXd b;     // free x free
  Eigen::MatrixXd a_fc;  // free x constrained
  std::vector<int> free_local;         // positions of free nodes in patch.nodes
  std::vector<int> constrained_local;  // positions of constrained nodes
};

/// a_kl: element stiffness over the patch triangles plus the unscaled
/// penalty S_h over the owned edges. b_kl: alpha-weighted mass times h^-2,
/// with h the grid spacing.
PatchForms assemble_patch_forms(const Mesh& mesh, const CoefficientField& field, const Patch& patch);

/// Ascending eigenvalues, b-orthonormal eigenvectors over the free nodes.
struct PatchSpectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

PatchSpectrum solve_patch_gevp(const PatchForms& forms);

struct EnrichmentPolicy {
  enum class Mode { FixedM, Threshold };
  Mode mode = Mode::FixedM;
  int m = 0;
  double threshold = 0.0;

  static EnrichmentPolicy fixed(int m) { return {Mode::FixedM, m, 0.0}; }
  static EnrichmentPolicy below(double lambda) { return {Mode::Threshold, 0, lambda}; }
  /// "none", "fixed:M" or "threshold:LAMBDA".
  static EnrichmentPolicy parse(const std::string& text);
  std::string label() const;
};

struct Selection {
  int m = 0;
  /// First eigenvalue not selected; +inf when the whole spectrum is taken.
  double lambda_next = std::numeric_limits<double>::infinity();
};

Selection select(const PatchSpectrum& spectrum, const EnrichmentPolicy& policy);

/// Fills subdomain interiors (the V_{k,0} dofs) with the a-harmonic extension
/// of the values on the boundary layers. Interior blocks are factored once.
class HarmonicExtender {
 public:
  HarmonicExtender(const linalg::SparseSym& a, const Partition& partition, int workers = default_workers());

  /// Overwrites the interior dofs of `v`; layer dofs are left unchanged.
  void extend(std::span<double> v, int workers = 1) const;
  linalg::Vector harmonic_extend(std::span<const double> layer_values) const;

 private:
  const linalg::SparseSym* a_;
  const std::vector<std::vector<int>>* interior_;
  std::vector<linalg::SparseCholesky> factors_;
};

/// Row-compressed list of sparse global vectors (the coarse restriction R).
class SparseRows {
 public:
  std::size_t size() const { return offsets_.size() - 1; }
  std::size_t nnz() const { return cols_.size(); }
  std::span<const int> cols(std::size_t i) const {
    return std::span<const int>(cols_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }
  std::span<const double> vals(std::size_t i) const {
    return std::span<const double>(vals_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }
  /// Appends the nonzero entries of a dense vector as a new row.
  void append_dense(std::span<const double> v);
  void append(std::span<const int> cols, std::span<const double> vals);
  linalg::Vector row_dense(std::size_t i, std::size_t n) const;
  SparseRows subset(std::span<const int> rows) const;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<int> cols_;
  std::vector<double> vals_;
};

/// Everything computed once per patch: forms, spectrum and the factor of
/// the free block used by the multiscale solves.
struct PatchProblem {
  PatchForms forms;
  PatchSpectrum spectrum;
  linalg::DenseCholesky a_free;
};

PatchProblem solve_patch_problem(const Mesh& mesh, const CoefficientField& field, const Patch& patch);
std::vector<PatchProblem> solve_patch_problems(const Mesh& mesh, const CoefficientField& field,
                                               const Partition& partition, int workers = default_workers());

/// Patch values of one multiscale function: `g` on the constrained nodes and
/// the a_kl-harmonic completion on the free nodes, ordered as patch.nodes.
Eigen::VectorXd multiscale_patch_values(const PatchProblem& problem, const Eigen::VectorXd& g);

/// Multiscale functions: one per (patch, interior crosspoint endpoint), or
/// one per crosspoint DG node when `per_node` is set. Patch order, then
/// endpoint order.
SparseRows build_multiscale_basis(const Mesh& mesh, const Partition& partition,
                                  std::span<const PatchProblem> problems, const HarmonicExtender& extender,
                                  bool per_node = false, int workers = default_workers());

/// Extensions of the first `m` eigenvectors of every patch.
SparseRows build_spectral_basis(const Mesh& mesh, const Partition& partition, std::span<const PatchProblem> problems,
                                std::span<const int> m_per_patch, const HarmonicExtender& extender,
                                int workers = default_workers());

struct CoarseOptions {
  EnrichmentPolicy policy;
  bool multiscale_per_node = false;
  double rank_tolerance = 1e-12;
  int workers = default_workers();
};

struct CoarseSpace {
  SparseRows basis;  // rows of R after rank filtering
  int multiscale_count = 0;
  int spectral_count = 0;
  std::vector<int> m_per_patch;
  std::vector<double> lambda_next_per_patch;
  double min_lambda_next = std::numeric_limits<double>::infinity();
  /// Rows removed by the rank filter, in the unfiltered numbering.
  std::vector<int> dropped_rows;
  Eigen::MatrixXd a0;
  linalg::DenseCholesky factor;

  std::size_t dim() const { return basis.size(); }
  bool empty() const { return basis.size() == 0; }
  int max_m() const;
  /// z += R^T A0^{-1} R r
  void apply_add(std::span<const double> r, std::span<double> z) const;
};

/// R A R^T with the upper triangle computed and mirrored.
Eigen::MatrixXd galerkin_product(const linalg::SparseSym& a, const SparseRows& r, int workers = default_workers());

CoarseSpace build_coarse_space(const Mesh& mesh, const Partition& partition, const linalg::SparseSym& a,
                               std::span<const PatchProblem> problems, const HarmonicExtender& extender,
                               const CoarseOptions& options);

/// CSV with columns interface_id,k,l,j,lambda (j from 1).
void write_spectrum_csv(std::ostream& out, const Partition& partition, std::span<const PatchProblem> problems);

}  // namespace dgschwarz
