#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "oslalm/error.hpp"

namespace oslalm {

/// Dense vector of finite doubles. Holds images, sinograms, gradients and the
/// split variables alike.
class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t n, double fill = 0.0);
  explicit DenseVector(std::vector<double> values);
  DenseVector(std::initializer_list<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  std::span<double> span() noexcept { return values_; }
  std::span<const double> span() const noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  DenseVector& operator+=(const DenseVector& other);
  DenseVector& operator-=(const DenseVector& other);
  DenseVector& operator*=(double scale) noexcept;

  /// this += alpha * other
  DenseVector& axpy(double alpha, const DenseVector& other);

  bool all_finite() const noexcept;

  friend bool operator==(const DenseVector&, const DenseVector&) = default;

 private:
  std::vector<double> values_;
};

DenseVector operator+(DenseVector lhs, const DenseVector& rhs);
DenseVector operator-(DenseVector lhs, const DenseVector& rhs);
DenseVector operator*(double scale, DenseVector v);

double dot(const DenseVector& a, const DenseVector& b);
double norm2(const DenseVector& v);
double norm_inf(const DenseVector& v);
DenseVector cwise_product(const DenseVector& a, const DenseVector& b);
DenseVector cwise_quotient(const DenseVector& a, const DenseVector& b);

/// Row-compressed sparse matrix. Column indices are sorted within each row.
class SparseMatrix {
 public:
  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };

  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
               std::vector<std::uint32_t> col_idx, std::vector<double> values);

  /// Duplicate (row, col) entries are summed.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> triplets);
  static SparseMatrix identity(std::size_t n);
  static SparseMatrix from_dense(std::size_t rows, std::size_t cols,
                                 std::span<const double> row_major);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::uint32_t> row_indices(std::size_t r) const noexcept {
    return {col_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const double> row_values(std::size_t r) const noexcept {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }

  /// New matrix made of the given rows, in the given order.
  SparseMatrix select_rows(std::span<const std::size_t> rows) const;

  double row_sum(std::size_t r) const noexcept;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_idx_;
  std::vector<double> values_;
};

/// Diagonal operator; used for statistical weights and diagonal majorizers.
class DiagonalOperator {
 public:
  DiagonalOperator() = default;
  explicit DiagonalOperator(DenseVector diag) : diag_(std::move(diag)) {}
  static DiagonalOperator identity(std::size_t n) { return DiagonalOperator(DenseVector(n, 1.0)); }

  std::size_t size() const noexcept { return diag_.size(); }
  const DenseVector& diag() const noexcept { return diag_; }
  double operator[](std::size_t i) const noexcept { return diag_[i]; }

  DenseVector apply(const DenseVector& v) const;
  bool nonnegative() const noexcept;

 private:
  DenseVector diag_;
};

DenseVector spmv(const SparseMatrix& a, const DenseVector& x);
DenseVector spmv_t(const SparseMatrix& a, const DenseVector& r);

/// sum_i D_i v_i^2
double weighted_norm_sq(const DenseVector& v, const DiagonalOperator& d);

/// Safety factor applied to the power-iteration estimate of lambda_max(A'WA).
inline constexpr double kSpectralSafety = 1.01;

struct SpectralEstimate {
  double lambda_max = 0.0;  // raw Rayleigh-quotient estimate
  double bound = 0.0;       // lambda_max * kSpectralSafety
  int iterations = 0;
};

/// Power iteration on A'WA. Throws ConvergenceError (carrying the last
/// estimate) when the relative change does not drop below tol within iters.
SpectralEstimate estimate_spectrum(const SparseMatrix& a, const DiagonalOperator& w, int iters,
                                   double tol);

/// L > lambda_max(A'WA), i.e. the estimate inflated by kSpectralSafety.
double spectral_bound(const SparseMatrix& a, const DiagonalOperator& w, int iters = 500,
                      double tol = 1e-9);

}  // namespace oslalm
