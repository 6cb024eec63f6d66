#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oslalm/driver.hpp"
#include "oslalm/linalg.hpp"
#include "oslalm/prox.hpp"
#include "oslalm/solvers.hpp"

namespace oslalm {

// Per-eigencomponent dynamics of the gradient-based LALM on a quadratic.
// With r = lambda/L the characteristic polynomial of the component is
//   (1 + rho) q^2 - 2 (1 - r + rho/2) q + (1 - r).

enum class DampingRegime { under, critical, over };

std::string to_string(DampingRegime r);

struct DampingReport {
  double lambda_ratio = 0.0;
  double rho = 0.0;
  double rho_critical = 0.0;
  DampingRegime regime = DampingRegime::over;
  double rate = 0.0;                       // largest root modulus
  std::optional<double> damped_frequency;  // radians per iteration, under-damped only
};

/// |rho - rho_c| at or below this counts as critical damping.
inline constexpr double kCriticalTolerance = 1e-12;

/// 2 sqrt(r (1 - r))
double critical_rho(double lambda_ratio);
/// sqrt((1 - r) / (1 + rho_c))
double critical_rate(double lambda_ratio);
/// Dominant real root, (1 - r + rho/2 + sqrt(rho^2/4 - r(1 - r))) / (1 + rho). The
/// discriminant is clamped at zero so the formula can be evaluated at rho_c.
double over_damped_rate(double lambda_ratio, double rho);
/// Real part of the complex root pair, (1 - r + rho/2) / (1 + rho). Equals the
/// critical rate at rho_c.
double under_damped_rate(double lambda_ratio, double rho);
/// Modulus of the complex root pair, sqrt((1 - r) / (1 + rho)); the decay rate
/// of an under-damped component.
double complex_root_modulus(double lambda_ratio, double rho);

/// Regime from the sign of rho - rho_c. For r = 1 the constant term vanishes;
/// the roots are 0 and rho/(1 + rho) and the larger one is reported.
DampingReport classify_damping(double lambda_ratio, double rho);

/// Fastest asymptotic rate: 2 sqrt(mu/L (1 - mu/L)).
double rho_star(double mu, double lipschitz);

/// |W^{1/2} A (x0 - x_hat)| / (sqrt(L) |x0 - x_hat|)
double rho_opt(const DenseVector& x0, const DenseVector& x_hat, const SparseMatrix& a,
               const DiagonalOperator& w, double lipschitz);

struct RecurrenceSample {
  double x = 0.0;  // image component (distance to the solution)
  double g = 0.0;  // split-gradient component, in units of L
};

/// The component recurrence with r = lambda/L:
///   x+ = x - r x - (1/rho - 1) g
///   g+ = rho/(1 + rho) r x+ + g/(1 + rho)
/// Returns steps + 1 samples starting with (x0, g0).
std::vector<RecurrenceSample> scalar_recurrence_sim(double lambda_ratio, double rho,
                                                    std::size_t steps, double x0, double g0);

/// Asymptotic rate of the recurrence: exp of the least-squares slope of
/// log |(x_k, g_k)| over the last 30% of a steps-long run, renormalizing the
/// state every step so nothing underflows.
double measure_asymptotic_rate(double lambda_ratio, double rho, std::size_t steps);

// Primal-dual view of the linearized AL method (whitened coordinates).

struct CppdaState {
  DenseVector z;      // dual variable
  DenseVector z_bar;  // over-relaxed dual
  DenseVector x;
};

/// z = -rho d, z_bar = -rho (d - W^{1/2}A x + u).
CppdaState cppda_from_lalm(const FullLalmState& state, const SparseMatrix& a,
                           const DiagonalOperator& w, double rho);

/// x+ = prox_{sigma h}(x - sigma A'z_bar), with per-pixel sigma;
/// z+ = (z + tau A x+ - tau y) / (1 + tau);  z_bar = 2 z+ - z.
CppdaState cppda_step(const CppdaState& state, const SparseMatrix& a, const DiagonalOperator& w,
                      const DenseVector& y, const ProxTerm& h, const DenseVector& sigma,
                      double tau);

struct GapContext {
  DenseVector x_hat;
  DenseVector z_hat;  // W^{1/2}(A x_hat - y)
  DenseVector x0;
  DenseVector z0;     // -rho d0
  double rho = 1.0;
  double t = 1.0;         // 1/L
  double a_norm_sq = 0.0;  // |W^{1/2}A|^2

  void validate() const;
};

/// Fills z_hat from x_hat, z0 from d0, and |A|^2 by power iteration.
GapContext make_gap_context(DenseVector x_hat, const FullLalmState& initial, const SparseMatrix& a,
                            const DiagonalOperator& w, const DenseVector& y, double rho,
                            double lipschitz);

/// Omega(z, x) = -<A'z, x> + g*(z) - h(x) with g*(z) = |z|^2/2 + <z, y>.
double primal_dual_function(const DenseVector& z, const DenseVector& x, const SparseMatrix& a,
                            const DiagonalOperator& w, const DenseVector& y, const ProxTerm& h);

/// Omega(z_avg, x_hat) - Omega(z_hat, x_avg). Throws when h(x_hat) is infinite.
double primal_dual_gap(const DenseVector& z_avg, const DenseVector& x_avg, const GapContext& ctx,
                       const SparseMatrix& a, const DiagonalOperator& w, const DenseVector& y,
                       const ProxTerm& h);

/// |x0 - x_hat| / sqrt(2t/rho) + |z0 - z_hat| / sqrt(2 rho)
double gap_constant(const GapContext& ctx);

struct GapBoundTerms {
  double c = 0.0;
  double a_k = 0.0;
  double b_k = 0.0;
  double bound = 0.0;
};

/// (C + 2 A_k + sqrt(B_k))^2 / k using eps[0..k-1]. Throws when t |A|^2 >= 1.
GapBoundTerms gap_bound(std::size_t k, const GapContext& ctx, std::span<const double> eps);

struct RestartPeriodReport {
  std::size_t restarts = 0;
  double mean_interval = 0.0;
  double stddev_interval = 0.0;
  double predicted = 0.0;           // (pi/2) sqrt(L/mu)
  double relative_deviation = 0.0;  // (mean - predicted) / predicted
  std::size_t episodes = 0;         // maximal runs of back-to-back restarts
  double mean_episode_interval = 0.0;  // between episode starts; 0 with one episode
};

/// Intervals, in inner updates, between consecutive restarts recorded in a
/// continuation log. Throws when fewer than two restarts occurred.
RestartPeriodReport restart_period_check(const ConvergenceLog& log, double mu, double lipschitz);

}  // namespace oslalm
