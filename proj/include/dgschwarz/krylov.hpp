#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgschwarz/linalg/cholesky.hpp"
#include "dgschwarz/linalg/sparse.hpp"

namespace dgschwarz {

/// z = M^{-1} r
using Preconditioner = std::function<void(std::span<const double> r, std::span<double> z)>;

Preconditioner identity_preconditioner();
/// Exact solve with a factorization of A; the factor must outlive the result.
Preconditioner direct_preconditioner(const linalg::SparseCholesky& factor);

/// Nonpositive curvature or a nonpositive preconditioned residual norm.
class BreakdownError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PcgOptions {
  double tol = 1e-6;
  int maxit = 1000;
  /// Record the Lanczos condition estimate after every iteration.
  bool kappa_history = false;
  /// Called after each update with (iteration, iterate, relative residual).
  std::function<void(int, std::span<const double>, double)> observer;
};

struct PcgReport {
  int iterations = 0;
  bool converged = false;
  /// ||b - A x_k|| / ||b||, starting with k = 0.
  std::vector<double> residuals;
  std::vector<double> alphas;
  std::vector<double> betas;
  /// Lanczos tridiagonal assembled from the CG coefficients.
  std::vector<double> lanczos_diag;
  std::vector<double> lanczos_offdiag;
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  double kappa_est = 1.0;
  std::vector<double> kappa_history;
};

struct PcgResult {
  linalg::Vector x;
  PcgReport report;
};

/// Starts from x = 0 and stops once the relative residual drops below tol.
PcgResult pcg(const linalg::SparseSym& a, std::span<const double> b, const Preconditioner& m,
              const PcgOptions& options = {});

/// Tridiagonal of the Lanczos process hidden in CG:
/// T_jj = 1/alpha_j + beta_{j-1}/alpha_{j-1}, T_{j,j+1} = sqrt(beta_j)/alpha_j.
void lanczos_from_cg(std::span<const double> alphas, std::span<const double> betas, std::vector<double>& diag,
                     std::vector<double>& offdiag);

void write_residual_csv(std::ostream& out, const PcgReport& report);

struct ConditionResult {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 0.0;
  std::string method;
  int steps = 0;  // Lanczos steps; 0 for the dense method
  bool converged = true;
};

inline constexpr std::size_t kDefaultDenseCap = 6000;

/// Exact extreme eigenvalues of M^{-1} A from the dense symmetric matrix
/// L^T M^{-1} L, A = L L^T. Throws when dim(A) exceeds `max_dim`.
ConditionResult dense_condition_oracle(const linalg::SparseSym& a, const Preconditioner& m,
                                       std::size_t max_dim = kDefaultDenseCap);

struct LanczosOracleOptions {
  /// Ritz residual bound relative to the Ritz value, for both extremes.
  double tol = 1e-8;
  int max_steps = 800;
  std::uint64_t seed = 12345;
};

/// Lanczos on M^{-1} A in the A inner product with full reorthogonalization,
/// run until the extreme Ritz pairs have converged. For problems too large
/// for the dense oracle.
ConditionResult lanczos_condition_oracle(const linalg::SparseSym& a, const Preconditioner& m,
                                         const LanczosOracleOptions& options = {});

}  // namespace dgschwarz
