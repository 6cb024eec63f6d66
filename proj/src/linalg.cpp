#include "oslalm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace oslalm {

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::dimension: return "dimension";
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::convergence: return "convergence";
    case ErrorCategory::config: return "config";
    case ErrorCategory::io: return "io";
    case ErrorCategory::data: return "data";
  }
  return "unknown";
}

void throw_dimension(const std::string& where, std::size_t expected, std::size_t actual) {
  std::ostringstream os;
  os << where << ": expected length " << expected << ", got " << actual;
  throw Error(ErrorCategory::dimension, os.str());
}

namespace {

void require_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(ErrorCategory::domain, "DenseVector: non-finite entry");
  }
}

void require_same(const char* where, const DenseVector& a, const DenseVector& b) {
  if (a.size() != b.size()) throw_dimension(where, a.size(), b.size());
}

}  // namespace

DenseVector::DenseVector(std::size_t n, double fill) : values_(n, fill) {
  if (!std::isfinite(fill)) throw Error(ErrorCategory::domain, "DenseVector: non-finite fill");
}

DenseVector::DenseVector(std::vector<double> values) : values_(std::move(values)) {
  require_finite(values_);
}

DenseVector::DenseVector(std::initializer_list<double> values) : values_(values) {
  require_finite(values_);
}

DenseVector& DenseVector::operator+=(const DenseVector& other) {
  require_same("DenseVector::operator+=", *this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

DenseVector& DenseVector::operator-=(const DenseVector& other) {
  require_same("DenseVector::operator-=", *this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

DenseVector& DenseVector::operator*=(double scale) noexcept {
  for (double& v : values_) v *= scale;
  return *this;
}

DenseVector& DenseVector::axpy(double alpha, const DenseVector& other) {
  require_same("DenseVector::axpy", *this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += alpha * other.values_[i];
  return *this;
}

bool DenseVector::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

DenseVector operator+(DenseVector lhs, const DenseVector& rhs) { return lhs += rhs; }
DenseVector operator-(DenseVector lhs, const DenseVector& rhs) { return lhs -= rhs; }
DenseVector operator*(double scale, DenseVector v) { return v *= scale; }

double dot(const DenseVector& a, const DenseVector& b) {
  require_same("dot", a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(const DenseVector& v) { return std::sqrt(dot(v, v)); }

double norm_inf(const DenseVector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

DenseVector cwise_product(const DenseVector& a, const DenseVector& b) {
  require_same("cwise_product", a, b);
  DenseVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

DenseVector cwise_quotient(const DenseVector& a, const DenseVector& b) {
  require_same("cwise_quotient", a, b);
  DenseVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] / b[i];
  return out;
}

// ---------------------------------------------------------------------------

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                           std::vector<std::uint32_t> col_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != rows_ + 1) throw_dimension("SparseMatrix row_ptr", rows_ + 1, row_ptr_.size());
  if (col_idx_.size() != values_.size()) throw_dimension("SparseMatrix values", col_idx_.size(), values_.size());
  if (row_ptr_.front() != 0 || row_ptr_.back() != values_.size())
    throw Error(ErrorCategory::dimension, "SparseMatrix: row_ptr does not span the value array");
  for (std::size_t r = 0; r < rows_; ++r) {
    if (row_ptr_[r] > row_ptr_[r + 1]) throw Error(ErrorCategory::dimension, "SparseMatrix: row_ptr not monotone");
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (col_idx_[k] >= cols_) throw Error(ErrorCategory::dimension, "SparseMatrix: column index out of range");
      if (k > row_ptr_[r] && col_idx_[k] <= col_idx_[k - 1])
        throw Error(ErrorCategory::dimension, "SparseMatrix: row indices not strictly ascending");
    }
  }
  require_finite(values_);
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> row_ptr(rows + 1, 0);
  std::vector<std::uint32_t> col_idx;
  std::vector<double> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  std::size_t k = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    while (k < triplets.size() && triplets[k].row == r) {
      const auto col = triplets[k].col;
      if (col >= cols) throw Error(ErrorCategory::dimension, "from_triplets: column index out of range");
      if (!col_idx.empty() && row_ptr[r] < col_idx.size() && col_idx.back() == col) {
        values.back() += triplets[k].value;
      } else {
        col_idx.push_back(static_cast<std::uint32_t>(col));
        values.push_back(triplets[k].value);
      }
      ++k;
    }
    row_ptr[r + 1] = col_idx.size();
  }
  if (k != triplets.size()) throw Error(ErrorCategory::dimension, "from_triplets: row index out of range");
  return SparseMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

SparseMatrix SparseMatrix::from_dense(std::size_t rows, std::size_t cols,
                                      std::span<const double> row_major) {
  if (row_major.size() != rows * cols) throw_dimension("SparseMatrix::from_dense", rows * cols, row_major.size());
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (row_major[r * cols + c] != 0.0) t.push_back({r, c, row_major[r * cols + c]});
  return from_triplets(rows, cols, std::move(t));
}

SparseMatrix SparseMatrix::select_rows(std::span<const std::size_t> rows) const {
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col_idx;
  std::vector<double> values;
  row_ptr.reserve(rows.size() + 1);
  for (std::size_t r : rows) {
    if (r >= rows_) throw Error(ErrorCategory::dimension, "select_rows: row index out of range");
    const auto idx = row_indices(r);
    const auto val = row_values(r);
    col_idx.insert(col_idx.end(), idx.begin(), idx.end());
    values.insert(values.end(), val.begin(), val.end());
    row_ptr.push_back(col_idx.size());
  }
  return SparseMatrix(rows.size(), cols_, std::move(row_ptr), std::move(col_idx), std::move(values));
}

double SparseMatrix::row_sum(std::size_t r) const noexcept {
  const auto val = row_values(r);
  return std::accumulate(val.begin(), val.end(), 0.0);
}

// ---------------------------------------------------------------------------

DenseVector DiagonalOperator::apply(const DenseVector& v) const { return cwise_product(diag_, v); }

bool DiagonalOperator::nonnegative() const noexcept {
  return std::all_of(diag_.begin(), diag_.end(), [](double d) { return d >= 0.0; });
}

DenseVector spmv(const SparseMatrix& a, const DenseVector& x) {
  if (x.size() != a.cols()) throw_dimension("spmv", a.cols(), x.size());
  DenseVector out(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto idx = a.row_indices(r);
    const auto val = a.row_values(r);
    double acc = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) acc += val[k] * x[idx[k]];
    out[r] = acc;
  }
  return out;
}

DenseVector spmv_t(const SparseMatrix& a, const DenseVector& r) {
  if (r.size() != a.rows()) throw_dimension("spmv_t", a.rows(), r.size());
  DenseVector out(a.cols());
  for (std::size_t row = 0; row < a.rows(); ++row) {
    const double rv = r[row];
    if (rv == 0.0) continue;
    const auto idx = a.row_indices(row);
    const auto val = a.row_values(row);
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] += val[k] * rv;
  }
  return out;
}

double weighted_norm_sq(const DenseVector& v, const DiagonalOperator& d) {
  if (v.size() != d.size()) throw_dimension("weighted_norm_sq", d.size(), v.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += d[i] * v[i] * v[i];
  return acc;
}

SpectralEstimate estimate_spectrum(const SparseMatrix& a, const DiagonalOperator& w, int iters,
                                   double tol) {
  if (iters < 1) throw Error(ErrorCategory::domain, "estimate_spectrum: iters must be >= 1");
  if (w.size() != a.rows()) throw_dimension("estimate_spectrum weights", a.rows(), w.size());

  // All-ones start with one fixed pseudo-random perturbation pass, so runs are
  // reproducible and the start is not orthogonal to the top eigenvector by symmetry.
  DenseVector v(a.cols(), 1.0);
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  for (double& x : v) x += jitter(rng);
  v *= 1.0 / norm2(v);

  double lambda = 0.0;
  for (int k = 1; k <= iters; ++k) {
    DenseVector av = spmv(a, v);
    const double rq = weighted_norm_sq(av, w);  // v'A'WAv with |v| = 1
    DenseVector next = spmv_t(a, w.apply(av));
    const double nrm = norm2(next);
    if (nrm == 0.0) return {0.0, 0.0, k};
    const bool done = k > 1 && std::abs(rq - lambda) <= tol * rq;
    lambda = rq;
    if (done) return {lambda, lambda * kSpectralSafety, k};
    next *= 1.0 / nrm;
    v = std::move(next);
  }
  throw ConvergenceError("estimate_spectrum: power iteration did not converge", lambda);
}

double spectral_bound(const SparseMatrix& a, const DiagonalOperator& w, int iters, double tol) {
  return estimate_spectrum(a, w, iters, tol).bound;
}

}  // namespace oslalm
