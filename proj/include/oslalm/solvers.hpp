#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "oslalm/linalg.hpp"
#include "oslalm/majorizer.hpp"
#include "oslalm/problem.hpp"
#include "oslalm/prox.hpp"

namespace oslalm {

inline constexpr double kDefaultRhoMin = 1e-3;

/// Iterate state of the gradient-based (and ordered-subsets) LALM.
struct SolverState {
  DenseVector x;
  DenseVector g_split;  // filtered average of past gradients
  DenseVector s_dir;    // last search direction
  DenseVector grad;     // gradient (M-scaled subset gradient in OS mode) at x, for the next step
  double rho = 1.0;
  std::size_t l_counter = 0;  // continuation index, reset on restart
  std::size_t epoch = 0;
  std::size_t inner_index = 0;
  double alpha = 1.0;  // Barzilai-Borwein scale of the majorizer

  // Epoch means of the visited images and of the M-scaled subset gradients
  // over the previous epoch, for the BB secant.
  DenseVector bb_x;
  DenseVector bb_grad;
};

/// g0 = grad0 and the cached gradient set to grad0, so the first search
/// direction is the plain gradient.
SolverState init_solver_state(DenseVector x0, DenseVector grad0);

/// Unsimplified linearized AL iterates for quadratic g, in whitened data
/// coordinates (u and d live on W^{1/2}-scaled sinograms).
struct FullLalmState {
  DenseVector x;
  DenseVector u;
  DenseVector d;
};

/// u0 = W^{1/2}A x0 and d0 = (W^{1/2}y - u0) / rho, which makes u + rho d equal
/// the whitened data.
FullLalmState init_full_lalm(DenseVector x0, const SparseMatrix& a, const DiagonalOperator& w,
                             const DenseVector& y, double rho);

/// W^{1/2} y
DenseVector whiten(const DiagonalOperator& w, const DenseVector& y);

/// max_i |u_i + rho d_i - (W^{1/2}y)_i|
double split_identity_residual(const FullLalmState& state, const DiagonalOperator& w,
                               const DenseVector& y, double rho);

/// u = rho/(rho+1) (Ax - d) + y/(rho+1)
DenseVector u_update_quadratic(const DenseVector& ax, const DenseVector& d, const DenseVector& y,
                               double rho);

/// One step of the unsimplified iterates: x by the linearized prox, then u in
/// closed form, then d <- d - Ax + u. Returns the new state.
FullLalmState full_lalm_step(const FullLalmState& state, const SparseMatrix& a,
                             const DiagonalOperator& w, const DenseVector& y, const ProxTerm& h,
                             const Majorizer& majorizer, double rho);

/// Linearized prox: argmin h(x) + rho/2 |x - (x - s/(rho L))|^2_L, with L the
/// majorizer metric. Shared by every LALM variant and by ISTA (rho = 1).
DenseVector linearized_prox(const DenseVector& x, const DenseVector& s, const ProxTerm& h,
                            const DenseVector& metric, double rho);

/// One gradient-based LALM step:
///   s = rho grad + (1 - rho) g;  x <- prox;  g <- rho/(rho+1) grad(x+) + g/(rho+1).
/// Uses and refreshes state.grad.
void lalm_step(SolverState& state, const GradientFn& grad_fn, const ProxTerm& h,
               const Majorizer& majorizer, double rho);

/// (g_prev_split - grad_new)'(grad_new - grad_prev). A restart is due when it is > 0.
double restart_indicator(const DenseVector& g_prev_split, const DenseVector& grad_new,
                         const DenseVector& grad_prev);

/// 1 for l = 0, else max(pi/(l+1) sqrt(1 - (pi/(2l+2))^2), rho_min).
double continuation_rho(std::size_t l, double rho_min);

enum class RhoMode { fixed, continuation };

struct RhoSchedule {
  RhoMode mode = RhoMode::fixed;
  double rho_fixed = 1.0;
  double rho_min = kDefaultRhoMin;
  bool bb = false;  // rescale the diagonal majorizer by a once-per-epoch BB fit
};

/// Called after every inner update with the new state and whether it restarted.
using InnerObserver = std::function<void(const SolverState&, bool restarted)>;

/// One pass over all subsets in visit order. subset_grads[m] returns the
/// unscaled gradient of the m-th subset term; the solver scales it by M.
/// state.grad must hold the M-scaled gradient of the first subset in
/// visit_order at state.x (init_solver_state does this for a fresh run).
void oslalm_epoch(SolverState& state, std::span<const GradientFn> subset_grads,
                  std::span<const std::size_t> visit_order, const ProxTerm& h,
                  const Majorizer& majorizer, const RhoSchedule& schedule,
                  const InnerObserver& observer = {});

/// Proximal gradient: x <- prox_{h/L}(x - grad(x)/L).
DenseVector ista_step(const DenseVector& x, const GradientFn& grad_fn, const ProxTerm& h,
                      const Majorizer& majorizer);

}  // namespace oslalm
