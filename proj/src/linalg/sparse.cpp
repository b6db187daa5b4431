#include "dgschwarz/linalg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace dgschwarz::linalg {

SparseSym SparseSym::from_triplets(std::size_t n, std::span<const Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row < 0 || t.col < 0 || static_cast<std::size_t>(t.row) >= n ||
        static_cast<std::size_t>(t.col) >= n) {
      throw std::out_of_range("triplet index outside matrix dimension");
    }
  }

  // Counting sort by row, then a stable sort by column inside each row keeps
  // the insertion order of duplicates.
  std::vector<std::size_t> row_count(n + 1, 0);
  for (const auto& t : triplets) ++row_count[t.row + 1];
  std::partial_sum(row_count.begin(), row_count.end(), row_count.begin());

  std::vector<std::size_t> order(triplets.size());
  {
    auto next = row_count;
    for (std::size_t k = 0; k < triplets.size(); ++k) order[next[triplets[k].row]++] = k;
  }

  SparseSym m;
  m.n_ = n;
  m.offsets_.assign(n + 1, 0);
  m.cols_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto first = order.begin() + static_cast<std::ptrdiff_t>(row_count[i]);
    auto last = order.begin() + static_cast<std::ptrdiff_t>(row_count[i + 1]);
    std::stable_sort(first, last, [&](std::size_t a, std::size_t b) {
      return triplets[a].col < triplets[b].col;
    });
    for (auto it = first; it != last; ++it) {
      const auto& t = triplets[*it];
      if (!m.cols_.empty() && m.cols_.size() > m.offsets_[i] && m.cols_.back() == t.col) {
        m.values_.back() += t.value;
      } else {
        m.cols_.push_back(t.col);
        m.values_.push_back(t.value);
      }
    }
    m.offsets_[i + 1] = m.cols_.size();
  }
  return m;
}

SparseSym SparseSym::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back({static_cast<int>(i), static_cast<int>(i), 1.0});
  return from_triplets(n, t);
}

double SparseSym::coeff(int i, int j) const {
  auto cols = row_cols(static_cast<std::size_t>(i));
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return values_[offsets_[i] + static_cast<std::size_t>(it - cols.begin())];
}

void SparseSym::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_ || y.size() != n_) throw std::invalid_argument("spmv: dimension mismatch");
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) s += values_[p] * x[cols_[p]];
    y[i] = s;
  }
}

SparseSym SparseSym::principal_submatrix(std::span<const int> indices) const {
  std::vector<int> local(n_, -1);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] < 0 || static_cast<std::size_t>(indices[k]) >= n_) {
      throw std::out_of_range("principal_submatrix: index out of range");
    }
    local[indices[k]] = static_cast<int>(k);
  }
  std::vector<Triplet> t;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto i = static_cast<std::size_t>(indices[k]);
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
      const int lj = local[cols_[p]];
      if (lj >= 0) t.push_back({static_cast<int>(k), lj, values_[p]});
    }
  }
  return from_triplets(indices.size(), t);
}

double SparseSym::symmetry_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
      worst = std::max(worst, std::abs(values_[p] - coeff(cols_[p], static_cast<int>(i))));
    }
  }
  return worst;
}

double SparseSym::frobenius_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

Eigen::MatrixXd SparseSym::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
      d(static_cast<Eigen::Index>(i), cols_[p]) = values_[p];
    }
  }
  return d;
}

Eigen::MatrixXd SparseSym::dense_block(std::span<const int> rows, std::span<const int> cols) const {
  std::unordered_map<int, int> col_pos;
  col_pos.reserve(cols.size() * 2);
  for (std::size_t c = 0; c < cols.size(); ++c) col_pos.emplace(cols[c], static_cast<int>(c));
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                            static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto i = static_cast<std::size_t>(rows[r]);
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
      auto it = col_pos.find(cols_[p]);
      if (it != col_pos.end()) d(static_cast<Eigen::Index>(r), it->second) = values_[p];
    }
  }
  return d;
}

Vector spmv(const SparseSym& a, std::span<const double> x) {
  Vector y(a.dim());
  a.multiply(x, y);
  return y;
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void write_matrix_market(std::ostream& out, const SparseSym& a) {
  std::size_t lower = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (int j : a.row_cols(i)) {
      if (static_cast<std::size_t>(j) <= i) ++lower;
    }
  }
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << a.dim() << ' ' << a.dim() << ' ' << lower << '\n';
  out << std::setprecision(17);
  // Column-major order of the lower triangle, as the format expects.
  std::vector<std::vector<std::pair<std::size_t, double>>> by_col(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    for (std::size_t p = 0; p < cols.size(); ++p) {
      if (static_cast<std::size_t>(cols[p]) <= i) by_col[cols[p]].emplace_back(i, vals[p]);
    }
  }
  for (std::size_t j = 0; j < a.dim(); ++j) {
    for (const auto& [i, v] : by_col[j]) out << i + 1 << ' ' << j + 1 << ' ' << v << '\n';
  }
}

SparseSym read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0) {
    throw std::runtime_error("matrix market: missing header");
  }
  const bool symmetric = line.find("symmetric") != std::string::npos;
  while (std::getline(in, line) && !line.empty() && line[0] == '%') {
  }
  std::istringstream dims(line);
  std::size_t rows = 0, cols = 0, entries = 0;
  if (!(dims >> rows >> cols >> entries) || rows != cols) {
    throw std::runtime_error("matrix market: bad size line");
  }
  std::vector<Triplet> t;
  t.reserve(symmetric ? 2 * entries : entries);
  for (std::size_t k = 0; k < entries; ++k) {
    std::size_t i = 0, j = 0;
    double v = 0;
    if (!(in >> i >> j >> v)) throw std::runtime_error("matrix market: truncated entries");
    t.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), v});
    if (symmetric && i != j) t.push_back({static_cast<int>(j - 1), static_cast<int>(i - 1), v});
  }
  return SparseSym::from_triplets(rows, t);
}

}  // namespace dgschwarz::linalg
