#include "dgschwarz/krylov.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include <Eigen/Dense>

#include "dgschwarz/linalg/eigen.hpp"

namespace dgschwarz {

Preconditioner identity_preconditioner() {
  return [](std::span<const double> r, std::span<double> z) { std::copy(r.begin(), r.end(), z.begin()); };
}

Preconditioner direct_preconditioner(const linalg::SparseCholesky& factor) {
  return [&factor](std::span<const double> r, std::span<double> z) {
    std::copy(r.begin(), r.end(), z.begin());
    factor.solve_in_place(z);
  };
}

void lanczos_from_cg(std::span<const double> alphas, std::span<const double> betas, std::vector<double>& diag,
                     std::vector<double>& offdiag) {
  const std::size_t k = alphas.size();
  diag.resize(k);
  offdiag.resize(k > 0 ? k - 1 : 0);
  for (std::size_t j = 0; j < k; ++j) {
    diag[j] = 1.0 / alphas[j] + (j > 0 ? betas[j - 1] / alphas[j - 1] : 0.0);
    if (j + 1 < k) offdiag[j] = std::sqrt(betas[j]) / alphas[j];
  }
}

namespace {

void extreme_ritz(std::span<const double> alphas, std::span<const double> betas, double& lo, double& hi) {
  std::vector<double> d, e;
  lanczos_from_cg(alphas, betas, d, e);
  const Eigen::VectorXd ev = linalg::tridiagonal_eigenvalues(d, e);
  lo = ev[0];
  hi = ev[ev.size() - 1];
}

}  // namespace

PcgResult pcg(const linalg::SparseSym& a, std::span<const double> b, const Preconditioner& m,
              const PcgOptions& options) {
  const std::size_t n = a.dim();
  if (b.size() != n) throw std::invalid_argument("pcg: right-hand side length mismatch");
  PcgResult result;
  PcgReport& rep = result.report;
  result.x.assign(n, 0.0);

  const double bnorm = linalg::norm2(b);
  rep.residuals.push_back(bnorm > 0.0 ? 1.0 : 0.0);
  if (bnorm == 0.0) {
    rep.converged = true;
    return result;
  }

  linalg::Vector r(b.begin(), b.end());
  linalg::Vector z(n), p(n), q(n);
  m(r, z);
  double rz = linalg::dot(r, z);
  if (!(rz > 0.0)) throw BreakdownError("pcg: preconditioner is not positive definite (r^T M^{-1} r <= 0)");
  p = z;

  for (int k = 1; k <= options.maxit; ++k) {
    a.multiply(p, q);
    const double pq = linalg::dot(p, q);
    if (!(pq > 0.0)) throw BreakdownError("pcg: nonpositive curvature p^T A p <= 0; matrix is not SPD");
    const double alpha = rz / pq;
    linalg::axpy(alpha, p, result.x);
    linalg::axpy(-alpha, q, r);
    rep.alphas.push_back(alpha);
    rep.iterations = k;
    const double res = linalg::norm2(r) / bnorm;
    rep.residuals.push_back(res);
    if (options.observer) options.observer(k, result.x, res);
    if (res < options.tol) {
      rep.converged = true;
    } else {
      m(r, z);
      const double rz_new = linalg::dot(r, z);
      if (!(rz_new > 0.0)) throw BreakdownError("pcg: preconditioner is not positive definite (r^T M^{-1} r <= 0)");
      const double beta = rz_new / rz;
      rz = rz_new;
      rep.betas.push_back(beta);
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (options.kappa_history) {
      double lo = 0.0, hi = 0.0;
      extreme_ritz(rep.alphas, rep.betas, lo, hi);
      rep.kappa_history.push_back(hi / lo);
    }
    if (rep.converged) break;
  }

  lanczos_from_cg(rep.alphas, rep.betas, rep.lanczos_diag, rep.lanczos_offdiag);
  const Eigen::VectorXd ev = linalg::tridiagonal_eigenvalues(rep.lanczos_diag, rep.lanczos_offdiag);
  rep.lambda_min = ev[0];
  rep.lambda_max = ev[ev.size() - 1];
  rep.kappa_est = std::max(1.0, rep.lambda_max / rep.lambda_min);
  return result;
}

void write_residual_csv(std::ostream& out, const PcgReport& report) {
  out << "iteration,relative_residual\n";
  out.precision(17);
  for (std::size_t k = 0; k < report.residuals.size(); ++k) out << k << ',' << report.residuals[k] << '\n';
}

ConditionResult dense_condition_oracle(const linalg::SparseSym& a, const Preconditioner& m, std::size_t max_dim) {
  const std::size_t n = a.dim();
  if (n > max_dim) {
    throw std::invalid_argument("dense oracle: dimension " + std::to_string(n) + " exceeds the cap " +
                                std::to_string(max_dim));
  }
  ConditionResult out;
  out.method = "dense";
  if (n == 0) return out;

  Eigen::MatrixXd l = a.to_dense();
  {
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(l);
    if (llt.info() != Eigen::Success) throw linalg::NotPositiveDefinite("dense oracle: A is not positive definite", 0);
  }
  l.triangularView<Eigen::StrictlyUpper>().setZero();

  // W = M^{-1} L, column by column.
  Eigen::MatrixXd w(l.rows(), l.cols());
  linalg::Vector col(n), z(n);
  for (Eigen::Index j = 0; j < l.cols(); ++j) {
    Eigen::Map<Eigen::VectorXd>(col.data(), static_cast<Eigen::Index>(n)) = l.col(j);
    m(col, z);
    w.col(j) = Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(n));
  }
  Eigen::MatrixXd c = l.transpose().triangularView<Eigen::Upper>() * w;
  w.resize(0, 0);
  l.resize(0, 0);
  // Symmetrize away the rounding noise before the symmetric eigensolve.
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    for (Eigen::Index i = j + 1; i < c.rows(); ++i) {
      const double s = 0.5 * (c(i, j) + c(j, i));
      c(i, j) = s;
      c(j, i) = s;
    }
  }
  const Eigen::VectorXd ev = linalg::sym_eigenvalues(c);
  out.lambda_min = ev[0];
  out.lambda_max = ev[ev.size() - 1];
  out.kappa = out.lambda_max / out.lambda_min;
  return out;
}

ConditionResult lanczos_condition_oracle(const linalg::SparseSym& a, const Preconditioner& m,
                                         const LanczosOracleOptions& options) {
  const std::size_t n = a.dim();
  ConditionResult out;
  out.method = "lanczos";
  if (n == 0) return out;

  const int max_steps = std::min<int>(options.max_steps, static_cast<int>(n));
  std::vector<linalg::Vector> v, av;
  std::vector<double> alpha, beta;

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  linalg::Vector w(n), aw(n);
  for (double& x : w) x = dist(rng);
  a.multiply(w, aw);
  double nrm = std::sqrt(linalg::dot(w, aw));

  linalg::Vector t(n);
  for (int j = 0; j < max_steps; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      w[i] /= nrm;
      aw[i] /= nrm;
    }
    v.push_back(w);
    av.push_back(aw);

    m(av.back(), t);  // t = M^{-1} A v_j
    const double aj = linalg::dot(t, av.back());
    alpha.push_back(aj);
    // Two passes of Gram-Schmidt in the A inner product against all v_i.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double c = linalg::dot(t, av[i]);
        linalg::axpy(-c, v[i], t);
      }
    }
    w = t;
    a.multiply(w, aw);
    nrm = std::sqrt(std::max(0.0, linalg::dot(w, aw)));

    const std::vector<double> off(beta.begin(), beta.end());
    const auto spec = linalg::tridiagonal_spectrum(alpha, off);
    const auto k = spec.values.size();
    const double lo = spec.values[0];
    const double hi = spec.values[k - 1];
    const double res_lo = nrm * std::abs(spec.last_components[0]);
    const double res_hi = nrm * std::abs(spec.last_components[k - 1]);
    out.lambda_min = lo;
    out.lambda_max = hi;
    out.steps = j + 1;
    const bool done = res_lo <= options.tol * std::abs(lo) && res_hi <= options.tol * std::abs(hi);
    if (done || nrm <= 1e-14 * std::abs(hi)) break;
    if (j + 1 == max_steps) {
      out.converged = false;
      break;
    }
    beta.push_back(nrm);
  }
  out.kappa = out.lambda_max / out.lambda_min;
  return out;
}

}  // namespace dgschwarz
