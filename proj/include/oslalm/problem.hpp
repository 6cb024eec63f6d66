#pragma once

#include <functional>
#include <vector>

#include "oslalm/ct_model.hpp"
#include "oslalm/linalg.hpp"
#include "oslalm/regularizer.hpp"

namespace oslalm {

/// Gradient of a smooth data term at an image.
using GradientFn = std::function<DenseVector(const DenseVector&)>;

/// Penalized weighted least squares:
///   Psi(x) = 1/2 |y - Ax|^2_W + beta R(x),  x in box.
struct PwlsProblem {
  SparseMatrix a;
  DiagonalOperator weights;
  DenseVector y;
  ImageGrid grid;
  RegularizerConfig reg;
  BoxConstraint box;

  std::size_t n_pixels() const noexcept { return a.cols(); }
  void validate() const;

  double data_term(const DenseVector& x) const;
  /// A'W(Ax - y)
  DenseVector data_gradient(const DenseVector& x) const;
  /// Gradient of the smooth part, data term plus beta R.
  DenseVector smooth_gradient(const DenseVector& x) const;
};

struct ObjectiveValue {
  double value = 0.0;    // data term + beta R, box indicator excluded
  bool feasible = true;  // false when x leaves the box
};

ObjectiveValue objective(const PwlsProblem& problem, const DenseVector& x);

/// Per-subset pieces of the data term, l_m(x) = 1/2 |y_m - A_m x|^2_{W_m}.
class OrderedSubsets {
 public:
  OrderedSubsets(const PwlsProblem& problem, const Geometry& geo, std::size_t m);

  std::size_t count() const noexcept { return partition_.count; }
  const SubsetPartition& partition() const noexcept { return partition_; }
  const std::vector<std::size_t>& visit_order() const noexcept { return partition_.visit_order; }

  /// grad l_m(x), not scaled by M.
  DenseVector gradient(std::size_t m, const DenseVector& x) const;
  /// One gradient function per subset, indexed by subset number.
  std::vector<GradientFn> gradient_functions() const;

 private:
  SubsetPartition partition_;
  std::vector<SparseMatrix> a_;
  std::vector<DiagonalOperator> w_;
  std::vector<DenseVector> y_;
};

}  // namespace oslalm
