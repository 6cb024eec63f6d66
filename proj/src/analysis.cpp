#include "oslalm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oslalm {

namespace {

void check_ratio(double lambda_ratio) {
  if (!(lambda_ratio > 0.0 && lambda_ratio <= 1.0))
    throw Error(ErrorCategory::domain, "lambda/L must lie in (0, 1]");
}

DenseVector sqrt_weights(const DiagonalOperator& w) {
  DenseVector s(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) s[i] = std::sqrt(w[i]);
  return s;
}

// W^{1/2} A x and A' W^{1/2} z
DenseVector forward_whitened(const SparseMatrix& a, const DenseVector& sw, const DenseVector& x) {
  return cwise_product(sw, spmv(a, x));
}
DenseVector back_whitened(const SparseMatrix& a, const DenseVector& sw, const DenseVector& z) {
  return spmv_t(a, cwise_product(sw, z));
}

}  // namespace

std::string to_string(DampingRegime r) {
  switch (r) {
    case DampingRegime::under: return "under";
    case DampingRegime::critical: return "critical";
    case DampingRegime::over: return "over";
  }
  return "unknown";
}

double critical_rho(double lambda_ratio) {
  check_ratio(lambda_ratio);
  return 2.0 * std::sqrt(lambda_ratio * (1.0 - lambda_ratio));
}

double critical_rate(double lambda_ratio) {
  return std::sqrt((1.0 - lambda_ratio) / (1.0 + critical_rho(lambda_ratio)));
}

double over_damped_rate(double lambda_ratio, double rho) {
  check_ratio(lambda_ratio);
  const double r = lambda_ratio;
  // rho^2/4 - r(1 - r) factored so it vanishes exactly at rho = rho_c.
  const double s = std::sqrt(r * (1.0 - r));
  const double disc = std::max(0.0, (rho / 2.0 - s) * (rho / 2.0 + s));
  return (1.0 - r + rho / 2.0 + std::sqrt(disc)) / (1.0 + rho);
}

double under_damped_rate(double lambda_ratio, double rho) {
  check_ratio(lambda_ratio);
  return (1.0 - lambda_ratio + rho / 2.0) / (1.0 + rho);
}

double complex_root_modulus(double lambda_ratio, double rho) {
  check_ratio(lambda_ratio);
  return std::sqrt((1.0 - lambda_ratio) / (1.0 + rho));
}

DampingReport classify_damping(double lambda_ratio, double rho) {
  check_ratio(lambda_ratio);
  if (!(rho > 0.0)) throw Error(ErrorCategory::domain, "classify_damping: rho must be positive");
  DampingReport rep;
  rep.lambda_ratio = lambda_ratio;
  rep.rho = rho;
  rep.rho_critical = critical_rho(lambda_ratio);
  if (lambda_ratio == 1.0) {
    // Constant term vanishes: roots 0 and rho/(1 + rho).
    rep.regime = DampingRegime::over;
    rep.rate = rho / (1.0 + rho);
    return rep;
  }
  if (std::abs(rho - rep.rho_critical) <= kCriticalTolerance) {
    rep.regime = DampingRegime::critical;
    rep.rate = critical_rate(lambda_ratio);
  } else if (rho > rep.rho_critical) {
    rep.regime = DampingRegime::over;
    rep.rate = over_damped_rate(lambda_ratio, rho);
  } else {
    rep.regime = DampingRegime::under;
    rep.rate = complex_root_modulus(lambda_ratio, rho);
    const double c = (1.0 - lambda_ratio + rho / 2.0) / std::sqrt((1.0 + rho) * (1.0 - lambda_ratio));
    rep.damped_frequency = std::acos(std::clamp(c, -1.0, 1.0));
  }
  return rep;
}

double rho_star(double mu, double lipschitz) {
  if (!(mu > 0.0 && mu <= lipschitz)) throw Error(ErrorCategory::domain, "rho_star: need 0 < mu <= L");
  const double r = mu / lipschitz;
  return 2.0 * std::sqrt(r * (1.0 - r));
}

double rho_opt(const DenseVector& x0, const DenseVector& x_hat, const SparseMatrix& a,
               const DiagonalOperator& w, double lipschitz) {
  if (x_hat.size() != x0.size()) throw_dimension("rho_opt x_hat", x0.size(), x_hat.size());
  if (!(lipschitz > 0.0)) throw Error(ErrorCategory::domain, "rho_opt: L must be positive");
  const DenseVector diff = x0 - x_hat;
  const double dn = norm2(diff);
  if (dn == 0.0) throw Error(ErrorCategory::domain, "rho_opt: x0 equals x_hat");
  return std::sqrt(weighted_norm_sq(spmv(a, diff), w)) / (std::sqrt(lipschitz) * dn);
}

std::vector<RecurrenceSample> scalar_recurrence_sim(double lambda_ratio, double rho,
                                                    std::size_t steps, double x0, double g0) {
  check_ratio(lambda_ratio);
  if (!(rho > 0.0)) throw Error(ErrorCategory::domain, "scalar_recurrence_sim: rho must be positive");
  if (steps < 2) throw Error(ErrorCategory::domain, "scalar_recurrence_sim: steps must be >= 2");
  const double r = lambda_ratio;
  std::vector<RecurrenceSample> out;
  out.reserve(steps + 1);
  RecurrenceSample s{x0, g0};
  out.push_back(s);
  for (std::size_t k = 0; k < steps; ++k) {
    const double x = s.x - r * s.x - (1.0 / rho - 1.0) * s.g;
    s.g = rho / (1.0 + rho) * r * x + s.g / (1.0 + rho);
    s.x = x;
    out.push_back(s);
  }
  return out;
}

double measure_asymptotic_rate(double lambda_ratio, double rho, std::size_t steps) {
  check_ratio(lambda_ratio);
  if (steps < 10) throw Error(ErrorCategory::domain, "measure_asymptotic_rate: steps must be >= 10");
  const double r = lambda_ratio;
  double x = 1.0, g = 0.3;  // generic start with both components excited
  double log_scale = 0.0;
  const std::size_t first = steps - (3 * steps) / 10;
  double sk = 0.0, sl = 0.0, skk = 0.0, skl = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double xn = x - r * x - (1.0 / rho - 1.0) * g;
    g = rho / (1.0 + rho) * r * xn + g / (1.0 + rho);
    x = xn;
    const double n = std::hypot(x, g);
    if (n == 0.0) return 0.0;
    log_scale += std::log(n);
    x /= n;
    g /= n;
    if (k >= first) {
      const double kk = static_cast<double>(k);
      sk += kk;
      sl += log_scale;
      skk += kk * kk;
      skl += kk * log_scale;
      ++count;
    }
  }
  const double c = static_cast<double>(count);
  const double slope = (c * skl - sk * sl) / (c * skk - sk * sk);
  return std::exp(slope);
}

CppdaState cppda_from_lalm(const FullLalmState& state, const SparseMatrix& a,
                           const DiagonalOperator& w, double rho) {
  const DenseVector ax = forward_whitened(a, sqrt_weights(w), state.x);
  CppdaState c;
  c.x = state.x;
  c.z = state.d;
  c.z *= -rho;
  c.z_bar = state.d - ax + state.u;
  c.z_bar *= -rho;
  return c;
}

CppdaState cppda_step(const CppdaState& state, const SparseMatrix& a, const DiagonalOperator& w,
                      const DenseVector& y, const ProxTerm& h, const DenseVector& sigma,
                      double tau) {
  if (sigma.size() != state.x.size()) throw_dimension("cppda_step sigma", state.x.size(), sigma.size());
  if (!(tau > 0.0)) throw Error(ErrorCategory::domain, "cppda_step: tau must be positive");
  const DenseVector sw = sqrt_weights(w);
  const DenseVector yw = cwise_product(sw, y);
  const DenseVector back = back_whitened(a, sw, state.z_bar);

  const std::size_t np = state.x.size();
  DenseVector point(np), metric(np);
  for (std::size_t i = 0; i < np; ++i) {
    point[i] = state.x[i] - sigma[i] * back[i];
    metric[i] = 1.0 / sigma[i];
  }
  CppdaState next;
  next.x = h.prox(point, metric, state.x);

  const DenseVector ax = forward_whitened(a, sw, next.x);
  next.z = DenseVector(ax.size());
  next.z_bar = DenseVector(ax.size());
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const double v = state.z[i] + tau * ax[i];
    next.z[i] = (v - tau * yw[i]) / (1.0 + tau);
    next.z_bar[i] = 2.0 * next.z[i] - state.z[i];
  }
  return next;
}

void GapContext::validate() const {
  if (x_hat.size() != x0.size()) throw_dimension("GapContext x_hat", x0.size(), x_hat.size());
  if (z_hat.size() != z0.size()) throw_dimension("GapContext z_hat", z0.size(), z_hat.size());
  if (!(rho > 0.0) || !(t > 0.0)) throw Error(ErrorCategory::domain, "GapContext: rho and t must be positive");
  if (!(a_norm_sq >= 0.0)) throw Error(ErrorCategory::domain, "GapContext: |A|^2 must be >= 0");
}

GapContext make_gap_context(DenseVector x_hat, const FullLalmState& initial, const SparseMatrix& a,
                            const DiagonalOperator& w, const DenseVector& y, double rho,
                            double lipschitz) {
  GapContext ctx;
  const DenseVector sw = sqrt_weights(w);
  ctx.z_hat = forward_whitened(a, sw, x_hat) - cwise_product(sw, y);
  ctx.x_hat = std::move(x_hat);
  ctx.x0 = initial.x;
  ctx.z0 = initial.d;
  ctx.z0 *= -rho;
  ctx.rho = rho;
  ctx.t = 1.0 / lipschitz;
  try {
    ctx.a_norm_sq = estimate_spectrum(a, w, 5000, 1e-13).lambda_max;
  } catch (const ConvergenceError& e) {
    ctx.a_norm_sq = e.last_estimate();  // only used for the step condition
  }
  ctx.validate();
  return ctx;
}

double primal_dual_function(const DenseVector& z, const DenseVector& x, const SparseMatrix& a,
                            const DiagonalOperator& w, const DenseVector& y, const ProxTerm& h) {
  const DenseVector sw = sqrt_weights(w);
  const DenseVector ax = forward_whitened(a, sw, x);
  const DenseVector yw = cwise_product(sw, y);
  return -dot(z, ax) + 0.5 * dot(z, z) + dot(z, yw) - h.value(x);
}

double primal_dual_gap(const DenseVector& z_avg, const DenseVector& x_avg, const GapContext& ctx,
                       const SparseMatrix& a, const DiagonalOperator& w, const DenseVector& y,
                       const ProxTerm& h) {
  if (!std::isfinite(h.value(ctx.x_hat)))
    throw Error(ErrorCategory::domain, "primal_dual_gap: h(x_hat) is infinite");
  return primal_dual_function(z_avg, ctx.x_hat, a, w, y, h) -
         primal_dual_function(ctx.z_hat, x_avg, a, w, y, h);
}

double gap_constant(const GapContext& ctx) {
  ctx.validate();
  return norm2(ctx.x0 - ctx.x_hat) / std::sqrt(2.0 * ctx.t / ctx.rho) +
         norm2(ctx.z0 - ctx.z_hat) / std::sqrt(2.0 * ctx.rho);
}

GapBoundTerms gap_bound(std::size_t k, const GapContext& ctx, std::span<const double> eps) {
  if (k < 1) throw Error(ErrorCategory::domain, "gap_bound: k must be >= 1");
  if (eps.size() < k) throw_dimension("gap_bound eps", k, eps.size());
  const double margin = 1.0 - ctx.t * ctx.a_norm_sq;
  if (!(margin > 0.0)) throw Error(ErrorCategory::domain, "gap_bound: step condition t|A|^2 < 1 violated");
  GapBoundTerms out;
  out.c = gap_constant(ctx);
  const double denom = margin * ctx.t / ctx.rho;
  for (std::size_t j = 0; j < k; ++j) {
    if (!(eps[j] >= 0.0)) throw Error(ErrorCategory::domain, "gap_bound: eps must be non-negative");
    out.a_k += std::sqrt(eps[j] / denom);
    out.b_k += eps[j];
  }
  const double root = out.c + 2.0 * out.a_k + std::sqrt(out.b_k);
  out.bound = root * root / static_cast<double>(k);
  return out;
}

RestartPeriodReport restart_period_check(const ConvergenceLog& log, double mu, double lipschitz) {
  if (!(mu > 0.0 && mu <= lipschitz)) throw Error(ErrorCategory::domain, "restart_period_check: need 0 < mu <= L");
  std::vector<std::size_t> at;
  std::size_t update = 0;
  for (const LogRow& r : log.rows) {
    if (r.epoch == 0) continue;  // initial row
    ++update;
    if (r.restarted) at.push_back(update);
  }
  if (at.size() < 2) throw Error(ErrorCategory::data, "fewer than 2 restarts observed");
  RestartPeriodReport rep;
  rep.restarts = at.size();
  std::vector<double> gaps;
  for (std::size_t i = 1; i < at.size(); ++i) gaps.push_back(static_cast<double>(at[i] - at[i - 1]));
  double sum = 0.0;
  for (double g : gaps) sum += g;
  rep.mean_interval = sum / static_cast<double>(gaps.size());
  double var = 0.0;
  for (double g : gaps) var += (g - rep.mean_interval) * (g - rep.mean_interval);
  rep.stddev_interval = std::sqrt(var / static_cast<double>(gaps.size()));
  rep.predicted = std::numbers::pi / 2.0 * std::sqrt(lipschitz / mu);
  rep.relative_deviation = (rep.mean_interval - rep.predicted) / rep.predicted;
  std::vector<std::size_t> starts{at.front()};
  for (std::size_t i = 1; i < at.size(); ++i)
    if (at[i] != at[i - 1] + 1) starts.push_back(at[i]);
  rep.episodes = starts.size();
  if (starts.size() > 1)
    rep.mean_episode_interval =
        static_cast<double>(starts.back() - starts.front()) / static_cast<double>(starts.size() - 1);
  return rep;
}

}  // namespace oslalm
