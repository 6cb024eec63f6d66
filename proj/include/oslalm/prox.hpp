#pragma once

#include "oslalm/ct_model.hpp"
#include "oslalm/linalg.hpp"
#include "oslalm/regularizer.hpp"

namespace oslalm {

/// n FISTA iterations on
///   minimize beta R(x) + 1/2 |x - target|^2_metric  subject to the box,
/// warm-started at x_warm, with the diagonal step metric + reg_curvature_diag.
/// Returns the last iterate.
DenseVector inner_denoise(const DenseVector& x_warm, const DiagonalOperator& metric,
                          const DenseVector& target, const RegularizerConfig& cfg,
                          const ImageGrid& grid, const BoxConstraint& box, int n);

/// The non-smooth term h of the composite problem, accessed through its value
/// and its (possibly inexact) proximal mapping in a diagonal metric:
///   prox(point, metric) ~ argmin_x h(x) + 1/2 |x - point|^2_metric.
class ProxTerm {
 public:
  virtual ~ProxTerm() = default;

  virtual DenseVector prox(const DenseVector& point, const DenseVector& metric,
                           const DenseVector& warm) const = 0;
  /// +inf outside the domain of h.
  virtual double value(const DenseVector& x) const = 0;
  /// True when prox() returns the exact minimizer.
  virtual bool exact() const = 0;
};

/// h = beta R + indicator(box). The prox runs n inner FISTA iterations; with
/// beta = 0 it is the exact box projection.
class RegularizedBox final : public ProxTerm {
 public:
  RegularizedBox(RegularizerConfig cfg, ImageGrid grid, BoxConstraint box, int n_inner);

  DenseVector prox(const DenseVector& point, const DenseVector& metric,
                   const DenseVector& warm) const override;
  double value(const DenseVector& x) const override;
  bool exact() const override { return cfg_.beta == 0.0; }

  int n_inner() const noexcept { return n_inner_; }

 private:
  RegularizerConfig cfg_;
  ImageGrid grid_;
  BoxConstraint box_;
  int n_inner_;
};

/// h = c/2 |x|^2, exact closed-form prox.
class QuadraticPenalty final : public ProxTerm {
 public:
  explicit QuadraticPenalty(double c) : c_(c) {}

  DenseVector prox(const DenseVector& point, const DenseVector& metric,
                   const DenseVector& warm) const override;
  double value(const DenseVector& x) const override;
  bool exact() const override { return true; }

 private:
  double c_;
};

}  // namespace oslalm
