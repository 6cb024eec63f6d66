#include "oslalm/regularizer.hpp"

#include <algorithm>
#include <cmath>

namespace oslalm {

double Potential::value(double t) const noexcept {
  if (kind == PotentialKind::quadratic) return 0.5 * t * t;
  const double a = std::abs(t) / delta;
  return delta * delta * (a - std::log1p(a));
}

double Potential::derivative(double t) const noexcept {
  if (kind == PotentialKind::quadratic) return t;
  return t / (1.0 + std::abs(t) / delta);
}

double Potential::curvature(double t) const noexcept {
  if (kind == PotentialKind::quadratic) return 1.0;
  const double q = 1.0 + std::abs(t) / delta;
  return 1.0 / (q * q);
}

void RegularizerConfig::validate() const {
  if (!std::isfinite(beta) || beta < 0.0) throw Error(ErrorCategory::domain, "regularizer: beta must be finite and >= 0");
  if (potential.kind == PotentialKind::fair && !(potential.delta > 0.0))
    throw Error(ErrorCategory::domain, "regularizer: fair potential needs delta > 0");
}

namespace {

// Calls f(j, k) once per unordered 4-neighbour pair.
template <typename F>
void for_each_pair(const ImageGrid& grid, F&& f) {
  for (std::size_t r = 0; r < grid.ny; ++r) {
    for (std::size_t c = 0; c < grid.nx; ++c) {
      const std::size_t j = r * grid.nx + c;
      if (c + 1 < grid.nx) f(j, j + 1);
      if (r + 1 < grid.ny) f(j, j + grid.nx);
    }
  }
}

}  // namespace

double reg_value(const RegularizerConfig& cfg, const ImageGrid& grid, const DenseVector& x) {
  if (x.size() != grid.size()) throw_dimension("reg_value", grid.size(), x.size());
  if (cfg.beta == 0.0) return 0.0;
  double acc = 0.0;
  for_each_pair(grid, [&](std::size_t j, std::size_t k) { acc += cfg.potential.value(x[j] - x[k]); });
  return cfg.beta * acc;
}

DenseVector reg_gradient(const RegularizerConfig& cfg, const ImageGrid& grid, const DenseVector& x) {
  if (x.size() != grid.size()) throw_dimension("reg_gradient", grid.size(), x.size());
  DenseVector g(x.size());
  if (cfg.beta == 0.0) return g;
  for_each_pair(grid, [&](std::size_t j, std::size_t k) {
    const double d = cfg.beta * cfg.potential.derivative(x[j] - x[k]);
    g[j] += d;
    g[k] -= d;
  });
  return g;
}

DiagonalOperator reg_curvature_diag(const RegularizerConfig& cfg, const ImageGrid& grid) {
  DenseVector d(grid.size());
  if (cfg.beta == 0.0) return DiagonalOperator(std::move(d));
  for_each_pair(grid, [&](std::size_t j, std::size_t k) {
    d[j] += 2.0 * cfg.beta;
    d[k] += 2.0 * cfg.beta;
  });
  return DiagonalOperator(std::move(d));
}

bool BoxConstraint::contains(const DenseVector& x) const noexcept {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v >= lo && v <= hi; });
}

void BoxConstraint::validate() const {
  if (!(lo <= hi)) throw Error(ErrorCategory::domain, "BoxConstraint: lo must not exceed hi");
}

DenseVector project_box(const BoxConstraint& box, const DenseVector& x) {
  DenseVector out = x;
  project_box_inplace(box, out);
  return out;
}

void project_box_inplace(const BoxConstraint& box, DenseVector& x) noexcept {
  for (double& v : x) v = std::clamp(v, box.lo, box.hi);
}

}  // namespace oslalm
