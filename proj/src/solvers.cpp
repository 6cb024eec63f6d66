#include "oslalm/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oslalm {

namespace {

DenseVector sqrt_weights(const DiagonalOperator& w) {
  DenseVector s(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) s[i] = std::sqrt(w[i]);
  return s;
}

// Shared tail of every gradient-based LALM update. Takes the gradient at the
// new image (for the next step) and returns the restart indicator.
double advance(SolverState& state, DenseVector x_new, DenseVector s, DenseVector grad_new,
               double rho) {
  const double xi = restart_indicator(state.g_split, grad_new, state.grad);
  const double keep = 1.0 / (rho + 1.0);
  const double take = rho / (rho + 1.0);
  for (std::size_t i = 0; i < state.g_split.size(); ++i)
    state.g_split[i] = take * grad_new[i] + keep * state.g_split[i];
  state.x = std::move(x_new);
  state.s_dir = std::move(s);
  state.grad = std::move(grad_new);
  state.rho = rho;
  return xi;
}

DenseVector search_direction(const SolverState& state, double rho) {
  DenseVector s(state.grad.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] = rho * state.grad[i] + (1.0 - rho) * state.g_split[i];
  return s;
}

}  // namespace

SolverState init_solver_state(DenseVector x0, DenseVector grad0) {
  if (grad0.size() != x0.size()) throw_dimension("init_solver_state", x0.size(), grad0.size());
  SolverState st;
  st.x = std::move(x0);
  st.g_split = grad0;
  st.s_dir = DenseVector(st.x.size());
  st.grad = std::move(grad0);
  return st;
}

DenseVector whiten(const DiagonalOperator& w, const DenseVector& y) {
  if (w.size() != y.size()) throw_dimension("whiten", w.size(), y.size());
  return cwise_product(sqrt_weights(w), y);
}

FullLalmState init_full_lalm(DenseVector x0, const SparseMatrix& a, const DiagonalOperator& w,
                             const DenseVector& y, double rho) {
  if (!(rho > 0.0)) throw Error(ErrorCategory::domain, "init_full_lalm: rho must be positive");
  DenseVector u = cwise_product(sqrt_weights(w), spmv(a, x0));
  DenseVector d = whiten(w, y) - u;
  d *= 1.0 / rho;
  return {std::move(x0), std::move(u), std::move(d)};
}

double split_identity_residual(const FullLalmState& state, const DiagonalOperator& w,
                               const DenseVector& y, double rho) {
  const DenseVector yw = whiten(w, y);
  double worst = 0.0;
  for (std::size_t i = 0; i < yw.size(); ++i)
    worst = std::max(worst, std::abs(state.u[i] + rho * state.d[i] - yw[i]));
  return worst;
}

DenseVector u_update_quadratic(const DenseVector& ax, const DenseVector& d, const DenseVector& y,
                               double rho) {
  if (!(rho > 0.0)) throw Error(ErrorCategory::domain, "u_update_quadratic: rho must be positive");
  if (d.size() != ax.size()) throw_dimension("u_update_quadratic d", ax.size(), d.size());
  if (y.size() != ax.size()) throw_dimension("u_update_quadratic y", ax.size(), y.size());
  DenseVector u(ax.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = rho / (rho + 1.0) * (ax[i] - d[i]) + y[i] / (rho + 1.0);
  return u;
}

DenseVector linearized_prox(const DenseVector& x, const DenseVector& s, const ProxTerm& h,
                            const DenseVector& metric, double rho) {
  if (s.size() != x.size()) throw_dimension("linearized_prox s", x.size(), s.size());
  if (metric.size() != x.size()) throw_dimension("linearized_prox metric", x.size(), metric.size());
  DenseVector scaled(x.size()), point(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    scaled[i] = rho * metric[i];
    point[i] = x[i] - s[i] / scaled[i];
  }
  return h.prox(point, scaled, x);
}

FullLalmState full_lalm_step(const FullLalmState& state, const SparseMatrix& a,
                             const DiagonalOperator& w, const DenseVector& y, const ProxTerm& h,
                             const Majorizer& majorizer, double rho) {
  if (!(rho > 0.0)) throw Error(ErrorCategory::domain, "full_lalm_step: rho must be positive");
  const DenseVector sw = sqrt_weights(w);
  const DenseVector yw = cwise_product(sw, y);

  DenseVector r = cwise_product(sw, spmv(a, state.x)) - state.u - state.d;
  DenseVector s = spmv_t(a, cwise_product(sw, r));
  s *= rho;

  FullLalmState next;
  next.x = linearized_prox(state.x, s, h, majorizer.metric(), rho);
  const DenseVector ax = cwise_product(sw, spmv(a, next.x));
  next.u = u_update_quadratic(ax, state.d, yw, rho);
  next.d = state.d - ax + next.u;
  return next;
}

void lalm_step(SolverState& state, const GradientFn& grad_fn, const ProxTerm& h,
               const Majorizer& majorizer, double rho) {
  if (!(rho > 0.0)) throw Error(ErrorCategory::domain, "lalm_step: rho must be positive");
  DenseVector s = search_direction(state, rho);
  DenseVector x_new = linearized_prox(state.x, s, h, majorizer.metric(), rho);
  DenseVector grad_new = grad_fn(x_new);
  advance(state, std::move(x_new), std::move(s), std::move(grad_new), rho);
  ++state.inner_index;
}

double restart_indicator(const DenseVector& g_prev_split, const DenseVector& grad_new,
                         const DenseVector& grad_prev) {
  if (grad_new.size() != g_prev_split.size())
    throw_dimension("restart_indicator grad_new", g_prev_split.size(), grad_new.size());
  if (grad_prev.size() != g_prev_split.size())
    throw_dimension("restart_indicator grad_prev", g_prev_split.size(), grad_prev.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < grad_new.size(); ++i)
    acc += (g_prev_split[i] - grad_new[i]) * (grad_new[i] - grad_prev[i]);
  return acc;
}

double continuation_rho(std::size_t l, double rho_min) {
  if (l == 0) return 1.0;
  const double lp1 = static_cast<double>(l) + 1.0;
  const double q = std::numbers::pi / (2.0 * lp1);
  const double rho = std::numbers::pi / lp1 * std::sqrt(1.0 - q * q);
  return std::max(rho, rho_min);
}

void oslalm_epoch(SolverState& state, std::span<const GradientFn> subset_grads,
                  std::span<const std::size_t> visit_order, const ProxTerm& h,
                  const Majorizer& majorizer, const RhoSchedule& schedule,
                  const InnerObserver& observer) {
  const std::size_t m_count = subset_grads.size();
  if (m_count == 0) throw Error(ErrorCategory::config, "oslalm_epoch: no subsets");
  if (visit_order.size() != m_count)
    throw_dimension("oslalm_epoch visit_order", m_count, visit_order.size());
  if (schedule.mode == RhoMode::fixed && !(schedule.rho_fixed > 0.0 && schedule.rho_fixed <= 1.0))
    throw Error(ErrorCategory::config, "oslalm_epoch: rho must lie in (0, 1]");
  if (!(schedule.rho_min > 0.0 && schedule.rho_min <= 1.0))
    throw Error(ErrorCategory::config, "oslalm_epoch: rho_min must lie in (0, 1]");
  if (schedule.bb && majorizer.kind == MajorizerKind::scalar)
    throw Error(ErrorCategory::config, "oslalm_epoch: BB scaling needs a diagonal majorizer");

  const double scale = static_cast<double>(m_count);
  const DiagonalOperator l_diag(majorizer.diag);
  DenseVector metric = majorizer.metric();
  DenseVector x_mean, grad_mean;
  if (schedule.bb) {
    x_mean = DenseVector(state.x.size());
    grad_mean = DenseVector(state.x.size());
    metric = majorizer.diag;
    metric *= state.alpha;
  }
  for (std::size_t j = 0; j < m_count; ++j) {
    const double rho = schedule.mode == RhoMode::continuation
                           ? continuation_rho(state.l_counter, schedule.rho_min)
                           : schedule.rho_fixed;
    DenseVector s = search_direction(state, rho);
    DenseVector x_new = linearized_prox(state.x, s, h, metric, rho);
    const std::size_t m_next = visit_order[(j + 1) % m_count];
    DenseVector grad_new = subset_grads[m_next](x_new);
    grad_new *= scale;
    const double xi = advance(state, std::move(x_new), std::move(s), std::move(grad_new), rho);

    const bool restarted = schedule.mode == RhoMode::continuation && xi > 0.0;
    state.l_counter = restarted ? 0 : state.l_counter + 1;
    state.inner_index = j + 1;
    if (schedule.bb) {
      x_mean.axpy(1.0 / scale, state.x);
      grad_mean.axpy(1.0 / scale, state.grad);
    }
    if (observer) observer(state, restarted);
  }
  if (schedule.bb) {
    // Secant between consecutive epoch means; alpha is held for the next epoch.
    if (!state.bb_x.empty()) {
      const DenseVector ds = x_mean - state.bb_x;
      if (weighted_norm_sq(ds, l_diag) > 0.0) state.alpha = bb_scale(l_diag, ds, grad_mean - state.bb_grad);
    }
    state.bb_x = std::move(x_mean);
    state.bb_grad = std::move(grad_mean);
  }
  ++state.epoch;
}

DenseVector ista_step(const DenseVector& x, const GradientFn& grad_fn, const ProxTerm& h,
                      const Majorizer& majorizer) {
  return linearized_prox(x, grad_fn(x), h, majorizer.metric(), 1.0);
}

}  // namespace oslalm
