#pragma once

#include <functional>
#include <span>
#include <vector>

#include "oslalm/problem.hpp"
#include "oslalm/solvers.hpp"

namespace oslalm {

/// Called after every inner (subset) update of a baseline with the current
/// image and the 1-based inner index.
using ImageObserver = std::function<void(const DenseVector& x, std::size_t inner)>;

/// L_diag + reg_curvature_diag: diagonal majorizer of the full PWLS Hessian.
DenseVector sqs_denominator(const DiagonalOperator& l_diag, const RegularizerConfig& reg,
                            const ImageGrid& grid);

/// Ordered-subsets separable quadratic surrogates:
///   x <- clamp(x - (M grad l_m(x) + grad beta R(x)) / denom)
/// for each subset in visit order.
void os_sqs_epoch(DenseVector& x, std::span<const GradientFn> subset_grads,
                  std::span<const std::size_t> visit_order, const RegularizerConfig& reg,
                  const ImageGrid& grid, const BoxConstraint& box, const DenseVector& denom,
                  const ImageObserver& observer = {});

/// Two-sequence Nesterov momentum over subset updates. With G_k the
/// M-scaled subset gradient plus the regularizer gradient at z_k:
///   x_{k+1} = clamp(z_k - G_k / D)
///   v_{k+1} = clamp(x_0 - (sum_{i<=k} t_i G_i) / (D + (k+2) gamma))
///   t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2
///   z_{k+1} = (1 - 1/t_{k+1}) x_{k+1} + v_{k+1} / t_{k+1}
/// with t_0 = 1 and z_0 = x_0. gamma = 0 is the unrelaxed form.
struct MomentumState {
  DenseVector x;
  DenseVector z;
  DenseVector x0;
  DenseVector weighted_sum;  // sum of t_i G_i
  double t = 1.0;
  std::size_t step = 0;  // inner updates so far, across epochs
};

MomentumState init_momentum(const DenseVector& x0);

void os_nes05_epoch(MomentumState& state, std::span<const GradientFn> subset_grads,
                    std::span<const std::size_t> visit_order, const RegularizerConfig& reg,
                    const ImageGrid& grid, const BoxConstraint& box, const DenseVector& denom,
                    const ImageObserver& observer = {});

void os_rnes05_epoch(MomentumState& state, double gamma, std::span<const GradientFn> subset_grads,
                     std::span<const std::size_t> visit_order, const RegularizerConfig& reg,
                     const ImageGrid& grid, const BoxConstraint& box, const DenseVector& denom,
                     const ImageObserver& observer = {});

struct FistaResult {
  DenseVector x;
  int iterations = 0;
  int restarts = 0;
  bool converged = false;          // relative objective change reached tol
  std::vector<double> objective;  // objective after each iteration
};

/// FISTA on the full PWLS objective with diagonal step L_diag + reg curvature.
/// With restart on, momentum resets whenever <D(v - x+), x+ - x> > 0. Stops
/// after iters iterations, or earlier once the relative objective change is
/// at most tol (tol = 0 never stops early). observer sees every iterate.
FistaResult fista_reference(const PwlsProblem& problem, const DenseVector& x0, int iters,
                            double tol, bool restart, const ImageObserver& observer = {});

}  // namespace oslalm
