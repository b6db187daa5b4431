#include "dgschwarz/linalg/eigen.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "dgschwarz/linalg/cholesky.hpp"

namespace dgschwarz::linalg {

SymEigenResult sym_eig_generalized(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw std::invalid_argument("sym_eig_generalized: dimension mismatch");
  }
  if (a.rows() == 0) return {};
  // Reports the failing pivot when B is not SPD.
  DenseCholesky check(b);
  (void)check;

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw std::runtime_error("sym_eig_generalized: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

SymEigenResult sym_eig(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sym_eig: matrix not square");
  if (a.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw std::runtime_error("sym_eig: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sym_eigenvalues: matrix not square");
  if (a.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("sym_eigenvalues: eigensolver did not converge");
  return es.eigenvalues();
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tridiagonal_solver(std::span<const double> diag,
                                                                   std::span<const double> offdiag,
                                                                   int options) {
  if (diag.empty() || offdiag.size() + 1 != diag.size()) {
    throw std::invalid_argument("tridiagonal eigenvalues: inconsistent sizes");
  }
  const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(diag.data(), static_cast<Eigen::Index>(diag.size()));
  const Eigen::VectorXd e =
      Eigen::Map<const Eigen::VectorXd>(offdiag.data(), static_cast<Eigen::Index>(offdiag.size()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, options);
  if (es.info() != Eigen::Success) throw std::runtime_error("tridiagonal eigensolver did not converge");
  return es;
}

}  // namespace

Eigen::VectorXd tridiagonal_eigenvalues(std::span<const double> diag, std::span<const double> offdiag) {
  return tridiagonal_solver(diag, offdiag, Eigen::EigenvaluesOnly).eigenvalues();
}

TridiagonalSpectrum tridiagonal_spectrum(std::span<const double> diag, std::span<const double> offdiag) {
  auto es = tridiagonal_solver(diag, offdiag, Eigen::ComputeEigenvectors);
  return {es.eigenvalues(), es.eigenvectors().row(es.eigenvectors().rows() - 1).transpose()};
}

}  // namespace dgschwarz::linalg
