#include "oslalm/prox.hpp"

#include <cmath>
#include <limits>

namespace oslalm {

DenseVector inner_denoise(const DenseVector& x_warm, const DiagonalOperator& metric,
                          const DenseVector& target, const RegularizerConfig& cfg,
                          const ImageGrid& grid, const BoxConstraint& box, int n) {
  if (n < 1) throw Error(ErrorCategory::domain, "inner_denoise: n must be >= 1");
  if (metric.size() != x_warm.size()) throw_dimension("inner_denoise metric", x_warm.size(), metric.size());
  if (target.size() != x_warm.size()) throw_dimension("inner_denoise target", x_warm.size(), target.size());

  const DiagonalOperator curv = reg_curvature_diag(cfg, grid);
  const std::size_t np = x_warm.size();
  DenseVector step(np), pull(np);  // 1/P and metric/P with P = metric + curvature
  for (std::size_t i = 0; i < np; ++i) {
    const double p = metric[i] + curv[i];
    step[i] = 1.0 / p;
    pull[i] = metric[i] / p;
  }

  DenseVector x = x_warm;
  DenseVector v = x_warm;
  double t = 1.0;
  for (int k = 0; k < n; ++k) {
    const DenseVector gr = reg_gradient(cfg, grid, v);
    // v - P^{-1}(metric (v - target) + grad R(v)), arranged so that beta = 0
    // gives the target back without round-off.
    DenseVector next(np);
    for (std::size_t i = 0; i < np; ++i)
      next[i] = (curv[i] * v[i] - gr[i]) * step[i] + pull[i] * target[i];
    project_box_inplace(box, next);

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double momentum = (t - 1.0) / t_next;
    for (std::size_t i = 0; i < np; ++i) v[i] = next[i] + momentum * (next[i] - x[i]);
    x = std::move(next);
    t = t_next;
  }
  return x;
}

RegularizedBox::RegularizedBox(RegularizerConfig cfg, ImageGrid grid, BoxConstraint box, int n_inner)
    : cfg_(cfg), grid_(grid), box_(box), n_inner_(n_inner) {
  cfg_.validate();
  box_.validate();
  if (n_inner_ < 1) throw Error(ErrorCategory::domain, "RegularizedBox: n_inner must be >= 1");
}

DenseVector RegularizedBox::prox(const DenseVector& point, const DenseVector& metric,
                                 const DenseVector& warm) const {
  return inner_denoise(warm, DiagonalOperator(metric), point, cfg_, grid_, box_, n_inner_);
}

double RegularizedBox::value(const DenseVector& x) const {
  if (!box_.contains(x)) return std::numeric_limits<double>::infinity();
  return reg_value(cfg_, grid_, x);
}

DenseVector QuadraticPenalty::prox(const DenseVector& point, const DenseVector& metric,
                                   const DenseVector&) const {
  DenseVector out(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) out[i] = metric[i] * point[i] / (metric[i] + c_);
  return out;
}

double QuadraticPenalty::value(const DenseVector& x) const { return 0.5 * c_ * dot(x, x); }

}  // namespace oslalm
