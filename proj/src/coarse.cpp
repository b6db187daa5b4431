#include "dgschwarz/coarse.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "dgschwarz/linalg/eigen.hpp"
#include "dgschwarz/sipg.hpp"

namespace dgschwarz {

PatchForms assemble_patch_forms(const Mesh& mesh, const CoefficientField& field, const Patch& patch) {
  const auto n = static_cast<Eigen::Index>(patch.nodes.size());
  std::unordered_map<int, int> local;
  local.reserve(patch.nodes.size());
  for (std::size_t i = 0; i < patch.nodes.size(); ++i) local.emplace(patch.nodes[i], static_cast<int>(i));

  PatchForms f;
  f.a_full = Eigen::MatrixXd::Zero(n, n);
  f.b_full = Eigen::MatrixXd::Zero(n, n);
  const double inv_h2 = 1.0 / (mesh.h() * mesh.h());
  for (int t : patch.triangles) {
    const auto k = element::stiffness(mesh, t, field[t]);
    const auto m = element::mass(mesh, t, field[t]);
    const int base = local.at(dg_node(t, 0));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        f.a_full(base + i, base + j) += k[i][j];
        f.b_full(base + i, base + j) += inv_h2 * m[i][j];
      }
    }
  }
  for (int e : patch.owned_edges) {
    const Edge& edge = mesh.edges()[e];
    const auto blk = element::jump_jump(mesh, edge, edge_weights(mesh, edge, field).penalty);
    for (int i = 0; i < blk.size; ++i) {
      for (int j = 0; j < blk.size; ++j) f.a_full(local.at(blk.nodes[i]), local.at(blk.nodes[j])) += blk.m[i][j];
    }
  }

  for (int node : patch.free_nodes) f.free_local.push_back(local.at(node));
  for (int node : patch.constrained_nodes) f.constrained_local.push_back(local.at(node));
  f.a = f.a_full(f.free_local, f.free_local);
  f.b = f.b_full(f.free_local, f.free_local);
  f.a_fc = f.a_full(f.free_local, f.constrained_local);
  return f;
}

PatchSpectrum solve_patch_gevp(const PatchForms& forms) {
  auto r = linalg::sym_eig_generalized(forms.a, forms.b);
  return {std::move(r.values), std::move(r.vectors)};
}

EnrichmentPolicy EnrichmentPolicy::parse(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw std::invalid_argument("policy: bad number in '" + text + "'");
    return v;
  };
  if (text == "none") return fixed(0);
  if (text.rfind("fixed:", 0) == 0) {
    const double m = number(text.substr(6));
    if (m < 0 || m != static_cast<int>(m)) throw std::invalid_argument("policy: fixed count must be a non-negative integer");
    return fixed(static_cast<int>(m));
  }
  if (text.rfind("threshold:", 0) == 0) {
    const double lambda = number(text.substr(10));
    if (!(lambda >= 0.0)) throw std::invalid_argument("policy: threshold must be non-negative");
    return below(lambda);
  }
  throw std::invalid_argument("policy: expected none, fixed:M or threshold:LAMBDA, got '" + text + "'");
}

std::string EnrichmentPolicy::label() const {
  if (mode == Mode::FixedM) return m == 0 ? "none" : "fixed:" + std::to_string(m);
  char buf[64];
  std::snprintf(buf, sizeof buf, "threshold:%g", threshold);
  return buf;
}

Selection select(const PatchSpectrum& spectrum, const EnrichmentPolicy& policy) {
  const int dim = static_cast<int>(spectrum.values.size());
  Selection s;
  if (policy.mode == EnrichmentPolicy::Mode::FixedM) {
    s.m = std::clamp(policy.m, 0, dim);
  } else {
    while (s.m < dim && spectrum.values[s.m] < policy.threshold) ++s.m;
  }
  if (s.m < dim) s.lambda_next = spectrum.values[s.m];
  return s;
}

HarmonicExtender::HarmonicExtender(const linalg::SparseSym& a, const Partition& partition, int workers)
    : a_(&a), interior_(&partition.maps.interior_dofs), factors_(partition.maps.interior_dofs.size()) {
  parallel_for(
      factors_.size(),
      [&](std::size_t k) {
        const auto& idx = (*interior_)[k];
        if (idx.empty()) return;
        try {
          factors_[k] = linalg::SparseCholesky(a.principal_submatrix(idx));
        } catch (const linalg::NotPositiveDefinite& e) {
          throw std::runtime_error("harmonic extension: interior block of subdomain " + std::to_string(k) +
                                   " is singular (" + e.what() + ")");
        }
      },
      workers);
}

void HarmonicExtender::extend(std::span<double> v, int workers) const {
  if (v.size() != a_->dim()) throw std::invalid_argument("harmonic extension: vector length mismatch");
  for (const auto& idx : *interior_) {
    for (int i : idx) v[i] = 0.0;
  }
  parallel_for(
      interior_->size(),
      [&](std::size_t k) {
        const auto& idx = (*interior_)[k];
        if (idx.empty()) return;
        linalg::Vector y(idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r) {
          const auto cols = a_->row_cols(idx[r]);
          const auto vals = a_->row_values(idx[r]);
          double s = 0.0;
          for (std::size_t c = 0; c < cols.size(); ++c) s += vals[c] * v[cols[c]];
          y[r] = -s;
        }
        factors_[k].solve_in_place(y);
        for (std::size_t r = 0; r < idx.size(); ++r) v[idx[r]] = y[r];
      },
      workers);
}

linalg::Vector HarmonicExtender::harmonic_extend(std::span<const double> layer_values) const {
  linalg::Vector v(layer_values.begin(), layer_values.end());
  extend(v);
  return v;
}

void SparseRows::append_dense(std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) {
      cols_.push_back(static_cast<int>(i));
      vals_.push_back(v[i]);
    }
  }
  offsets_.push_back(cols_.size());
}

void SparseRows::append(std::span<const int> cols, std::span<const double> vals) {
  cols_.insert(cols_.end(), cols.begin(), cols.end());
  vals_.insert(vals_.end(), vals.begin(), vals.end());
  offsets_.push_back(cols_.size());
}

linalg::Vector SparseRows::row_dense(std::size_t i, std::size_t n) const {
  linalg::Vector v(n, 0.0);
  const auto c = cols(i);
  const auto x = vals(i);
  for (std::size_t k = 0; k < c.size(); ++k) v[c[k]] = x[k];
  return v;
}

SparseRows SparseRows::subset(std::span<const int> rows) const {
  SparseRows out;
  for (int r : rows) out.append(cols(r), vals(r));
  return out;
}

PatchProblem solve_patch_problem(const Mesh& mesh, const CoefficientField& field, const Patch& patch) {
  PatchProblem p;
  p.forms = assemble_patch_forms(mesh, field, patch);
  try {
    p.a_free = linalg::DenseCholesky(p.forms.a);
  } catch (const linalg::NotPositiveDefinite& e) {
    throw std::runtime_error("patch " + std::to_string(patch.interface) + ": a_kl is not positive definite on the free nodes (" +
                             e.what() + ")");
  }
  p.spectrum = solve_patch_gevp(p.forms);
  return p;
}

std::vector<PatchProblem> solve_patch_problems(const Mesh& mesh, const CoefficientField& field,
                                               const Partition& partition, int workers) {
  std::vector<PatchProblem> out(partition.patches.size());
  parallel_for(
      out.size(), [&](std::size_t i) { out[i] = solve_patch_problem(mesh, field, partition.patches[i]); }, workers);
  return out;
}

Eigen::VectorXd multiscale_patch_values(const PatchProblem& problem, const Eigen::VectorXd& g) {
  const PatchForms& f = problem.forms;
  const Eigen::VectorXd u_free = problem.a_free.solve(-(f.a_fc * g));
  Eigen::VectorXd values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(f.free_local.size() + f.constrained_local.size()));
  for (std::size_t i = 0; i < f.free_local.size(); ++i) values[f.free_local[i]] = u_free[static_cast<Eigen::Index>(i)];
  for (std::size_t i = 0; i < f.constrained_local.size(); ++i) values[f.constrained_local[i]] = g[static_cast<Eigen::Index>(i)];
  return values;
}

namespace {

struct BasisJob {
  int patch = 0;
  Eigen::VectorXd patch_values;  // ordered as patch.nodes
};

SparseRows extend_jobs(const Mesh& mesh, const Partition& partition, std::vector<BasisJob>& jobs,
                       const HarmonicExtender& extender, int workers) {
  std::vector<SparseRows> rows(jobs.size());
  parallel_for(
      jobs.size(),
      [&](std::size_t i) {
        linalg::Vector v(mesh.num_dg_nodes(), 0.0);
        const Patch& patch = partition.patches[jobs[i].patch];
        for (std::size_t n = 0; n < patch.nodes.size(); ++n) {
          v[patch.nodes[n]] = jobs[i].patch_values[static_cast<Eigen::Index>(n)];
        }
        extender.extend(v);
        rows[i].append_dense(v);
        jobs[i].patch_values.resize(0);
      },
      workers);
  SparseRows out;
  for (const auto& r : rows) out.append(r.cols(0), r.vals(0));
  return out;
}

}  // namespace

SparseRows build_multiscale_basis(const Mesh& mesh, const Partition& partition,
                                  std::span<const PatchProblem> problems, const HarmonicExtender& extender,
                                  bool per_node, int workers) {
  std::vector<BasisJob> jobs;
  for (std::size_t p = 0; p < partition.patches.size(); ++p) {
    const Patch& patch = partition.patches[p];
    const PatchProblem& prob = problems[p];
    for (int c : patch.crosspoint_endpoints) {
      std::vector<int> at_c;
      for (std::size_t i = 0; i < patch.constrained_nodes.size(); ++i) {
        if (mesh.vertex_of_node(patch.constrained_nodes[i]) == c) at_c.push_back(static_cast<int>(i));
      }
      const auto nc = static_cast<Eigen::Index>(patch.constrained_nodes.size());
      if (per_node) {
        for (int i : at_c) {
          Eigen::VectorXd g = Eigen::VectorXd::Zero(nc);
          g[i] = 1.0;
          jobs.push_back({static_cast<int>(p), multiscale_patch_values(prob, g)});
        }
      } else {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(nc);
        for (int i : at_c) g[i] = 1.0;
        jobs.push_back({static_cast<int>(p), multiscale_patch_values(prob, g)});
      }
    }
  }
  return extend_jobs(mesh, partition, jobs, extender, workers);
}

SparseRows build_spectral_basis(const Mesh& mesh, const Partition& partition, std::span<const PatchProblem> problems,
                                std::span<const int> m_per_patch, const HarmonicExtender& extender, int workers) {
  std::vector<BasisJob> jobs;
  for (std::size_t p = 0; p < partition.patches.size(); ++p) {
    const PatchForms& f = problems[p].forms;
    const auto n = static_cast<Eigen::Index>(f.free_local.size() + f.constrained_local.size());
    for (int j = 0; j < m_per_patch[p]; ++j) {
      Eigen::VectorXd values = Eigen::VectorXd::Zero(n);
      const auto psi = problems[p].spectrum.vectors.col(j);
      for (std::size_t i = 0; i < f.free_local.size(); ++i) values[f.free_local[i]] = psi[static_cast<Eigen::Index>(i)];
      jobs.push_back({static_cast<int>(p), std::move(values)});
    }
  }
  return extend_jobs(mesh, partition, jobs, extender, workers);
}

int CoarseSpace::max_m() const {
  return m_per_patch.empty() ? 0 : *std::max_element(m_per_patch.begin(), m_per_patch.end());
}

void CoarseSpace::apply_add(std::span<const double> r, std::span<double> z) const {
  if (empty()) return;
  Eigen::VectorXd r0(static_cast<Eigen::Index>(dim()));
  for (std::size_t i = 0; i < dim(); ++i) {
    const auto c = basis.cols(i);
    const auto v = basis.vals(i);
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += v[k] * r[c[k]];
    r0[static_cast<Eigen::Index>(i)] = s;
  }
  const Eigen::VectorXd y = factor.solve(r0);
  for (std::size_t i = 0; i < dim(); ++i) {
    const auto c = basis.cols(i);
    const auto v = basis.vals(i);
    const double yi = y[static_cast<Eigen::Index>(i)];
    for (std::size_t k = 0; k < c.size(); ++k) z[c[k]] += v[k] * yi;
  }
}

Eigen::MatrixXd galerkin_product(const linalg::SparseSym& a, const SparseRows& r, int workers) {
  const auto m = static_cast<Eigen::Index>(r.size());
  Eigen::MatrixXd a0 = Eigen::MatrixXd::Zero(m, m);
  parallel_for(
      r.size(),
      [&](std::size_t i) {
        linalg::Vector w(a.dim(), 0.0);
        const auto ci = r.cols(i);
        const auto vi = r.vals(i);
        for (std::size_t k = 0; k < ci.size(); ++k) {
          const auto cols = a.row_cols(ci[k]);
          const auto vals = a.row_values(ci[k]);
          for (std::size_t c = 0; c < cols.size(); ++c) w[cols[c]] += vals[c] * vi[k];
        }
        for (std::size_t j = i; j < r.size(); ++j) {
          const auto cj = r.cols(j);
          const auto vj = r.vals(j);
          double s = 0.0;
          for (std::size_t k = 0; k < cj.size(); ++k) s += vj[k] * w[cj[k]];
          a0(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
        }
      },
      workers);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = j + 1; i < m; ++i) a0(i, j) = a0(j, i);
  }
  return a0;
}

CoarseSpace build_coarse_space(const Mesh& mesh, const Partition& partition, const linalg::SparseSym& a,
                               std::span<const PatchProblem> problems, const HarmonicExtender& extender,
                               const CoarseOptions& options) {
  if (problems.size() != partition.patches.size()) {
    throw std::invalid_argument("coarse space: one patch problem per interface expected");
  }
  CoarseSpace cs;
  if (partition.patches.empty()) return cs;

  for (const auto& prob : problems) {
    const Selection s = select(prob.spectrum, options.policy);
    cs.m_per_patch.push_back(s.m);
    cs.lambda_next_per_patch.push_back(s.lambda_next);
    cs.min_lambda_next = std::min(cs.min_lambda_next, s.lambda_next);
  }

  SparseRows all = build_multiscale_basis(mesh, partition, problems, extender, options.multiscale_per_node,
                                          options.workers);
  cs.multiscale_count = static_cast<int>(all.size());
  const SparseRows spectral =
      build_spectral_basis(mesh, partition, problems, cs.m_per_patch, extender, options.workers);
  cs.spectral_count = static_cast<int>(spectral.size());
  for (std::size_t i = 0; i < spectral.size(); ++i) all.append(spectral.cols(i), spectral.vals(i));

  Eigen::MatrixXd a0 = galerkin_product(a, all, options.workers);
  const auto rank = linalg::pivoted_cholesky_rank(a0, options.rank_tolerance);
  if (rank.dropped.empty()) {
    cs.basis = std::move(all);
    cs.a0 = std::move(a0);
  } else {
    cs.dropped_rows = rank.dropped;
    cs.basis = all.subset(rank.kept);
    cs.a0 = a0(rank.kept, rank.kept);
  }
  try {
    cs.factor = linalg::DenseCholesky(cs.a0);
  } catch (const linalg::NotPositiveDefinite& e) {
    throw std::runtime_error(std::string("coarse matrix is not positive definite after rank filtering: ") + e.what());
  }
  return cs;
}

void write_spectrum_csv(std::ostream& out, const Partition& partition, std::span<const PatchProblem> problems) {
  out << "interface_id,k,l,j,lambda\n";
  char buf[64];
  for (std::size_t p = 0; p < problems.size(); ++p) {
    const auto& iface = partition.interfaces[p];
    const auto& values = problems[p].spectrum.values;
    for (Eigen::Index j = 0; j < values.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", values[j]);
      out << iface.id << ',' << iface.k << ',' << iface.l << ',' << j + 1 << ',' << buf << '\n';
    }
  }
}

}  // namespace dgschwarz
