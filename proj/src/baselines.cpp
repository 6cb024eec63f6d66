#include "oslalm/baselines.hpp"

#include <cmath>

namespace oslalm {

namespace {

void check_subsets(std::span<const GradientFn> subset_grads, std::span<const std::size_t> order) {
  if (subset_grads.empty()) throw Error(ErrorCategory::config, "no subsets given");
  if (order.size() != subset_grads.size())
    throw_dimension("visit_order", subset_grads.size(), order.size());
}

// M grad l_m(x) + grad beta R(x)
DenseVector subset_surrogate_gradient(const GradientFn& grad, double scale,
                                      const RegularizerConfig& reg, const ImageGrid& grid,
                                      const DenseVector& x) {
  DenseVector g = grad(x);
  g *= scale;
  if (reg.beta != 0.0) g += reg_gradient(reg, grid, x);
  return g;
}

}  // namespace

DenseVector sqs_denominator(const DiagonalOperator& l_diag, const RegularizerConfig& reg,
                            const ImageGrid& grid) {
  return l_diag.diag() + reg_curvature_diag(reg, grid).diag();
}

void os_sqs_epoch(DenseVector& x, std::span<const GradientFn> subset_grads,
                  std::span<const std::size_t> visit_order, const RegularizerConfig& reg,
                  const ImageGrid& grid, const BoxConstraint& box, const DenseVector& denom,
                  const ImageObserver& observer) {
  check_subsets(subset_grads, visit_order);
  if (denom.size() != x.size()) throw_dimension("os_sqs_epoch denom", x.size(), denom.size());
  const double scale = static_cast<double>(subset_grads.size());
  for (std::size_t j = 0; j < visit_order.size(); ++j) {
    const DenseVector g = subset_surrogate_gradient(subset_grads[visit_order[j]], scale, reg, grid, x);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= g[i] / denom[i];
    project_box_inplace(box, x);
    if (observer) observer(x, j + 1);
  }
}

MomentumState init_momentum(const DenseVector& x0) {
  MomentumState st;
  st.x = x0;
  st.z = x0;
  st.x0 = x0;
  st.weighted_sum = DenseVector(x0.size());
  return st;
}

void os_rnes05_epoch(MomentumState& state, double gamma, std::span<const GradientFn> subset_grads,
                     std::span<const std::size_t> visit_order, const RegularizerConfig& reg,
                     const ImageGrid& grid, const BoxConstraint& box, const DenseVector& denom,
                     const ImageObserver& observer) {
  check_subsets(subset_grads, visit_order);
  if (!(gamma >= 0.0)) throw Error(ErrorCategory::domain, "os_rnes05_epoch: gamma must be >= 0");
  if (denom.size() != state.x.size()) throw_dimension("os_rnes05_epoch denom", state.x.size(), denom.size());
  const double scale = static_cast<double>(subset_grads.size());
  const std::size_t np = state.x.size();

  for (std::size_t j = 0; j < visit_order.size(); ++j) {
    const DenseVector g =
        subset_surrogate_gradient(subset_grads[visit_order[j]], scale, reg, grid, state.z);
    DenseVector x_next(np), v(np);
    const double relax = static_cast<double>(state.step + 2) * gamma;
    for (std::size_t i = 0; i < np; ++i) {
      x_next[i] = state.z[i] - g[i] / denom[i];
      state.weighted_sum[i] += state.t * g[i];
      v[i] = state.x0[i] - state.weighted_sum[i] / (denom[i] + relax);
    }
    project_box_inplace(box, x_next);
    project_box_inplace(box, v);

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * state.t * state.t));
    for (std::size_t i = 0; i < np; ++i)
      state.z[i] = (1.0 - 1.0 / t_next) * x_next[i] + v[i] / t_next;
    state.x = std::move(x_next);
    state.t = t_next;
    ++state.step;
    if (observer) observer(state.x, j + 1);
  }
}

void os_nes05_epoch(MomentumState& state, std::span<const GradientFn> subset_grads,
                    std::span<const std::size_t> visit_order, const RegularizerConfig& reg,
                    const ImageGrid& grid, const BoxConstraint& box, const DenseVector& denom,
                    const ImageObserver& observer) {
  os_rnes05_epoch(state, 0.0, subset_grads, visit_order, reg, grid, box, denom, observer);
}

FistaResult fista_reference(const PwlsProblem& problem, const DenseVector& x0, int iters,
                            double tol, bool restart, const ImageObserver& observer) {
  if (iters < 1) throw Error(ErrorCategory::domain, "fista_reference: iters must be >= 1");
  if (!(tol >= 0.0)) throw Error(ErrorCategory::domain, "fista_reference: tol must be >= 0");
  problem.validate();
  if (x0.size() != problem.n_pixels()) throw_dimension("fista_reference x0", problem.n_pixels(), x0.size());

  const DenseVector denom = sqs_denominator(compute_Ldiag(problem.a, problem.weights), problem.reg, problem.grid);
  const std::size_t np = x0.size();

  FistaResult res;
  DenseVector x = project_box(problem.box, x0);
  DenseVector v = x;
  double t = 1.0;
  double prev = objective(problem, x).value;

  for (int k = 0; k < iters; ++k) {
    const DenseVector g = problem.smooth_gradient(v);
    DenseVector x_next(np);
    for (std::size_t i = 0; i < np; ++i) x_next[i] = v[i] - g[i] / denom[i];
    project_box_inplace(problem.box, x_next);

    double restart_test = 0.0;
    if (restart)
      for (std::size_t i = 0; i < np; ++i)
        restart_test += denom[i] * (v[i] - x_next[i]) * (x_next[i] - x[i]);

    if (restart && restart_test > 0.0) {
      t = 1.0;
      v = x_next;
      ++res.restarts;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double momentum = (t - 1.0) / t_next;
      for (std::size_t i = 0; i < np; ++i) v[i] = x_next[i] + momentum * (x_next[i] - x[i]);
      t = t_next;
    }
    x = std::move(x_next);
    res.iterations = k + 1;
    if (observer) observer(x, 1);

    const double obj = objective(problem, x).value;
    res.objective.push_back(obj);
    if (tol > 0.0 && std::abs(prev - obj) <= tol * std::abs(obj)) {
      res.converged = true;
      break;
    }
    prev = obj;
  }
  res.x = std::move(x);
  return res;
}

}  // namespace oslalm
