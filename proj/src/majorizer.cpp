#include "oslalm/majorizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace oslalm {

Majorizer Majorizer::scalar(double lipschitz, std::size_t n) {
  if (!(lipschitz > 0.0)) throw Error(ErrorCategory::domain, "Majorizer::scalar: L must be positive");
  return {MajorizerKind::scalar, DenseVector(n, lipschitz), 1.0};
}

Majorizer Majorizer::diagonal(DiagonalOperator l_diag) {
  for (double v : l_diag.diag())
    if (!(v > 0.0)) throw Error(ErrorCategory::domain, "Majorizer::diagonal: entries must be positive");
  return {MajorizerKind::diagonal, l_diag.diag(), 1.0};
}

DenseVector Majorizer::metric() const {
  if (alpha == 1.0) return diag;
  DenseVector m = diag;
  m *= alpha;
  return m;
}

DiagonalOperator compute_Ldiag(const SparseMatrix& a, const DiagonalOperator& w) {
  if (w.size() != a.rows()) throw_dimension("compute_Ldiag weights", a.rows(), w.size());
  const DenseVector ones(a.cols(), 1.0);
  DenseVector d = spmv_t(a, w.apply(spmv(a, ones)));
  double floor_value = std::numeric_limits<double>::infinity();
  for (double v : d)
    if (v > 0.0) floor_value = std::min(floor_value, v);
  if (!std::isfinite(floor_value)) floor_value = 1.0;  // nothing touched at all
  for (double& v : d)
    if (!(v > 0.0)) v = floor_value;
  return DiagonalOperator(std::move(d));
}

double bb_scale(const DiagonalOperator& l_diag, const DenseVector& s, const DenseVector& y) {
  if (s.size() != l_diag.size()) throw_dimension("bb_scale s", l_diag.size(), s.size());
  if (y.size() != l_diag.size()) throw_dimension("bb_scale y", l_diag.size(), y.size());
  const double curvature = weighted_norm_sq(s, l_diag);
  if (!(curvature > 0.0)) throw Error(ErrorCategory::domain, "bb_scale: s' L_diag s must be positive");
  const double alpha = dot(s, y) / curvature;
  return std::clamp(alpha, kBbAlphaMin, 1.0);
}

MajorizationReport majorization_check(const SparseMatrix& a, const DiagonalOperator& w,
                                      const Majorizer& majorizer, std::size_t samples,
                                      std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorCategory::domain, "majorization_check: samples must be >= 1");
  if (majorizer.size() != a.cols()) throw_dimension("majorization_check", a.cols(), majorizer.size());
  const DenseVector m = majorizer.metric();
  const DiagonalOperator mop(m);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MajorizationReport rep;
  rep.samples = samples;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  rep.worst_relative_margin = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < samples; ++k) {
    DenseVector x(a.cols()), xbar(a.cols());
    for (double& v : x) v = normal(rng);
    for (double& v : xbar) v = normal(rng);
    DenseVector diff = x - xbar;
    // Three of every four samples are pushed towards the worst direction by
    // up to three steps of power iteration on M^{-1} A'WA.
    const int sharpen = static_cast<int>(k % 4);
    for (int it = 0; it < sharpen; ++it) {
      diff = cwise_quotient(spmv_t(a, w.apply(spmv(a, diff))), m);
      const double n = norm2(diff);
      if (n == 0.0) break;
      diff *= 1.0 / n;
    }
    const double lhs = weighted_norm_sq(spmv(a, diff), w);
    const double rhs = weighted_norm_sq(diff, mop);
    const double margin = rhs - lhs;
    const double rel = rhs > 0.0 ? margin / rhs : margin;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    rep.worst_relative_margin = std::min(rep.worst_relative_margin, rel);
  }
  rep.passed = rep.worst_relative_margin >= -kMajorizationTolerance;
  return rep;
}

}  // namespace oslalm
