#ifndef NZSG_VECMAT_HPP
#define NZSG_VECMAT_HPP

// Dense vectors and CSR matrices. All reductions run left to right so serial
// results are bitwise reproducible.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nzsg {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown by iterative routines that run out of budget. Carries the last
// estimate so callers can still report something.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_estimate)
      : std::runtime_error(what), last_estimate_(last_estimate) {}
  double last_estimate() const noexcept { return last_estimate_; }

 private:
  double last_estimate_;
};

namespace detail {
inline void require_dims(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected length " +
                         std::to_string(want) + ", got " + std::to_string(got));
  }
}
}  // namespace detail

class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t n, double fill = 0.0) : data_(n, fill) {
    check_finite();
  }
  DenseVector(std::initializer_list<double> values) : data_(values) {
    check_finite();
  }
  explicit DenseVector(std::vector<double> values) : data_(std::move(values)) {
    check_finite();
  }

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const DenseVector&, const DenseVector&) = default;

 private:
  void check_finite() const {
    if (!all_finite()) {
      throw std::invalid_argument("DenseVector: non-finite entry");
    }
  }

  std::vector<double> data_;
};

inline double dot(const DenseVector& a, const DenseVector& b) {
  detail::require_dims(b.size(), a.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(const DenseVector& a) { return dot(a, a); }
inline double norm(const DenseVector& a) { return std::sqrt(dot(a, a)); }

inline double squared_distance(const DenseVector& a, const DenseVector& b) {
  detail::require_dims(b.size(), a.size(), "squared_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// y <- y + alpha * x
inline void axpy(double alpha, const DenseVector& x, DenseVector& y) {
  detail::require_dims(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// alpha * a + beta * b
inline DenseVector lincomb(double alpha, const DenseVector& a, double beta,
                           const DenseVector& b) {
  detail::require_dims(b.size(), a.size(), "lincomb");
  DenseVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = alpha * a[i] + beta * b[i];
  return out;
}

inline DenseVector operator+(const DenseVector& a, const DenseVector& b) {
  return lincomb(1.0, a, 1.0, b);
}
inline DenseVector operator-(const DenseVector& a, const DenseVector& b) {
  return lincomb(1.0, a, -1.0, b);
}
inline DenseVector operator*(double c, const DenseVector& a) {
  DenseVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = c * a[i];
  return out;
}
inline DenseVector operator-(const DenseVector& a) { return -1.0 * a; }

inline double max_abs(const DenseVector& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs_diff(const DenseVector& a, const DenseVector& b) {
  detail::require_dims(b.size(), a.size(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Coordinate-format entry used to assemble CSR matrices.
struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Compressed sparse row matrix. Immutable after construction.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  SparseMatrix(std::size_t n_rows, std::size_t n_cols,
               std::vector<std::size_t> row_offsets,
               std::vector<std::size_t> col_indices, std::vector<double> values)
      : n_rows_(n_rows),
        n_cols_(n_cols),
        row_offsets_(std::move(row_offsets)),
        col_indices_(std::move(col_indices)),
        values_(std::move(values)) {
    validate();
  }

  // Builds from triplets in any order. Duplicates are summed; explicit
  // zeros are kept so the stored pattern is exactly what was given.
  static SparseMatrix from_triplets(std::size_t n_rows, std::size_t n_cols,
                                    std::vector<Triplet> entries) {
    std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<std::size_t> offsets(n_rows + 1, 0);
    std::vector<std::size_t> cols;
    std::vector<double> vals;
    cols.reserve(entries.size());
    vals.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto& e = entries[k];
      if (e.row >= n_rows || e.col >= n_cols) {
        throw DimensionError("SparseMatrix::from_triplets: index out of range");
      }
      if (k > 0 && entries[k - 1].row == e.row && entries[k - 1].col == e.col) {
        vals.back() += e.value;
        continue;
      }
      cols.push_back(e.col);
      vals.push_back(e.value);
      ++offsets[e.row + 1];
    }
    for (std::size_t i = 0; i < n_rows; ++i) offsets[i + 1] += offsets[i];
    return SparseMatrix(n_rows, n_cols, std::move(offsets), std::move(cols),
                        std::move(vals));
  }

  // Row-major dense input; zeros are dropped.
  static SparseMatrix from_dense(std::size_t n_rows, std::size_t n_cols,
                                 std::span<const double> row_major) {
    detail::require_dims(row_major.size(), n_rows * n_cols, "from_dense");
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n_rows; ++i)
      for (std::size_t j = 0; j < n_cols; ++j)
        if (row_major[i * n_cols + j] != 0.0) t.push_back({i, j, row_major[i * n_cols + j]});
    return from_triplets(n_rows, n_cols, std::move(t));
  }

  static SparseMatrix from_dense(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    std::vector<double> flat;
    for (const auto& row : rows) {
      detail::require_dims(row.size(), c, "from_dense row");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    return from_dense(r, c, flat);
  }

  static SparseMatrix identity(std::size_t n) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return from_triplets(n, n, std::move(t));
  }

  std::size_t rows() const noexcept { return n_rows_; }
  std::size_t cols() const noexcept { return n_cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }
  const std::vector<std::size_t>& col_indices() const noexcept { return col_indices_; }
  const std::vector<double>& values() const noexcept { return values_; }

  // Entry lookup by binary search within the row.
  double at(std::size_t i, std::size_t j) const {
    if (i >= n_rows_ || j >= n_cols_) throw DimensionError("SparseMatrix::at");
    auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
    auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
    auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - col_indices_.begin())];
  }

  std::vector<double> to_dense() const {
    std::vector<double> d(n_rows_ * n_cols_, 0.0);
    for (std::size_t i = 0; i < n_rows_; ++i)
      for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
        d[i * n_cols_ + col_indices_[k]] = values_[k];
    return d;
  }

  // Same sparsity pattern, values transformed elementwise.
  template <class Fn>
  SparseMatrix map_values(Fn&& fn) const {
    std::vector<double> v(values_.size());
    for (std::size_t k = 0; k < values_.size(); ++k) v[k] = fn(values_[k]);
    return SparseMatrix(n_rows_, n_cols_, row_offsets_, col_indices_, std::move(v));
  }

  SparseMatrix scaled(double c) const {
    return map_values([c](double v) { return c * v; });
  }

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  void validate() const {
    if (row_offsets_.size() != n_rows_ + 1)
      throw std::invalid_argument("SparseMatrix: row_offsets must have n_rows+1 entries");
    if (row_offsets_.front() != 0 || row_offsets_.back() != values_.size() ||
        col_indices_.size() != values_.size())
      throw std::invalid_argument("SparseMatrix: inconsistent offsets/indices/values");
    for (std::size_t i = 0; i < n_rows_; ++i) {
      if (row_offsets_[i] > row_offsets_[i + 1])
        throw std::invalid_argument("SparseMatrix: row_offsets not monotone");
      for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
        if (col_indices_[k] >= n_cols_)
          throw std::invalid_argument("SparseMatrix: column index out of range");
        if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1])
          throw std::invalid_argument("SparseMatrix: columns not strictly increasing");
      }
    }
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("SparseMatrix: non-finite value");
  }

  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

// result = A x
// alpha * A + beta * B over the union of both sparsity patterns.
inline SparseMatrix lincomb(double alpha, const SparseMatrix& A, double beta,
                           const SparseMatrix& B) {
  detail::require_dims(B.rows(), A.rows(), "sparse lincomb rows");
  detail::require_dims(B.cols(), A.cols(), "sparse lincomb cols");
  std::vector<Triplet> t;
  t.reserve(A.nnz() + B.nnz());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t k = A.row_offsets()[i]; k < A.row_offsets()[i + 1]; ++k)
      t.push_back({i, A.col_indices()[k], alpha * A.values()[k]});
    for (std::size_t k = B.row_offsets()[i]; k < B.row_offsets()[i + 1]; ++k)
      t.push_back({i, B.col_indices()[k], beta * B.values()[k]});
  }
  return SparseMatrix::from_triplets(A.rows(), A.cols(), std::move(t));
}

inline void spmv(const SparseMatrix& A, std::span<const double> x, std::span<double> out) {
  detail::require_dims(x.size(), A.cols(), "spmv");
  detail::require_dims(out.size(), A.rows(), "spmv output");
  const auto& off = A.row_offsets();
  const auto& col = A.col_indices();
  const auto& val = A.values();
  for (std::size_t i = 0; i < A.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) s += val[k] * x[col[k]];
    out[i] = s;
  }
}

inline DenseVector spmv(const SparseMatrix& A, const DenseVector& x) {
  DenseVector out(A.rows());
  spmv(A, x.span(), out.span());
  return out;
}

// result = A^T y, scattered row by row in storage order.
inline void spmv_transpose(const SparseMatrix& A, std::span<const double> y,
                           std::span<double> out) {
  detail::require_dims(y.size(), A.rows(), "spmv_transpose");
  detail::require_dims(out.size(), A.cols(), "spmv_transpose output");
  std::fill(out.begin(), out.end(), 0.0);
  const auto& off = A.row_offsets();
  const auto& col = A.col_indices();
  const auto& val = A.values();
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const double yi = y[i];
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) out[col[k]] += val[k] * yi;
  }
}

inline DenseVector spmv_transpose(const SparseMatrix& A, const DenseVector& y) {
  DenseVector out(A.cols());
  spmv_transpose(A, y.span(), out.span());
  return out;
}

struct SpectralNormOptions {
  double tol = 1e-8;
  int max_iter = 10000;
  std::uint64_t seed = 0;
};

// Largest singular value by power iteration on A^T A from a seeded Gaussian
// start. Stops when the extrapolated remaining error (change * r / (1 - r),
// r the observed contraction of successive changes) drops below tol * sigma.
inline double spectral_norm(const SparseMatrix& A, const SpectralNormOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw PreconditionError("spectral_norm: tol must be positive");
  if (A.nnz() == 0) return 0.0;

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseVector v(A.cols());
  for (auto& e : v) e = normal(rng);
  DenseVector Av(A.rows());

  double sigma = 0.0;
  double prev_change = -1.0;
  for (int it = 0; it < opt.max_iter; ++it) {
    const double nv = norm(v);
    if (nv == 0.0) return 0.0;
    for (auto& e : v) e /= nv;
    spmv(A, v.span(), Av.span());
    const double next = norm(Av);
    spmv_transpose(A, Av.span(), v.span());

    const double change = std::abs(next - sigma);
    sigma = next;
    if (it >= 2 && prev_change > 0.0) {
      double r = std::clamp(change / prev_change, 0.0, 1.0 - 1e-12);
      const double remaining = change * r / (1.0 - r);
      if (remaining <= opt.tol * sigma && change <= opt.tol * sigma) return sigma;
    }
    if (it >= 2 && change == 0.0) return sigma;
    prev_change = change;
  }
  throw ConvergenceError("spectral_norm: power iteration did not converge", sigma);
}

inline double spectral_norm(const SparseMatrix& A, double tol, int max_iter,
                            std::uint64_t seed) {
  return spectral_norm(A, SpectralNormOptions{tol, max_iter, seed});
}

}  // namespace nzsg

#endif  // NZSG_VECMAT_HPP
