#pragma once

#include <span>

#include <Eigen/Dense>

namespace dgschwarz::linalg {

/// Eigenpairs with ascending eigenvalues. For generalized problems the
/// columns of `vectors` are B-orthonormal.
struct SymEigenResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// All eigenpairs of A v = lambda B v for dense symmetric A and SPD B.
/// B is reduced by Cholesky to a standard symmetric problem, which is then
/// tridiagonalized and solved by implicit-shift QR.
/// Throws NotPositiveDefinite when B is not SPD.
SymEigenResult sym_eig_generalized(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

SymEigenResult sym_eig(const Eigen::MatrixXd& a);
Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& a);

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix with the given
/// diagonal and off-diagonal (size n-1).
Eigen::VectorXd tridiagonal_eigenvalues(std::span<const double> diag, std::span<const double> offdiag);

/// Tridiagonal eigenvalues plus the last component of every normalized
/// eigenvector (the quantity that bounds Lanczos Ritz residuals).
struct TridiagonalSpectrum {
  Eigen::VectorXd values;
  Eigen::VectorXd last_components;
};
TridiagonalSpectrum tridiagonal_spectrum(std::span<const double> diag, std::span<const double> offdiag);

}  // namespace dgschwarz::linalg
