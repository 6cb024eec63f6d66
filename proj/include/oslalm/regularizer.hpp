#pragma once

#include <limits>

#include "oslalm/ct_model.hpp"
#include "oslalm/linalg.hpp"

namespace oslalm {

enum class PotentialKind { quadratic, fair };

/// Convex even potential on pixel differences.
///   quadratic: psi(t) = t^2 / 2
///   fair:      psi(t) = delta^2 (|t|/delta - log(1 + |t|/delta))
/// Both have psi'' <= 1.
struct Potential {
  PotentialKind kind = PotentialKind::quadratic;
  double delta = 1.0;

  double value(double t) const noexcept;
  double derivative(double t) const noexcept;
  double curvature(double t) const noexcept;
};

/// beta * sum over horizontal and vertical neighbour pairs of psi(x_j - x_k).
struct RegularizerConfig {
  double beta = 0.0;
  Potential potential;

  void validate() const;
};

double reg_value(const RegularizerConfig& cfg, const ImageGrid& grid, const DenseVector& x);
DenseVector reg_gradient(const RegularizerConfig& cfg, const ImageGrid& grid, const DenseVector& x);

/// Gershgorin bound on the regularizer Hessian: 2 * beta * (#neighbours) per pixel.
DiagonalOperator reg_curvature_diag(const RegularizerConfig& cfg, const ImageGrid& grid);

struct BoxConstraint {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  static BoxConstraint unconstrained() {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
  bool contains(const DenseVector& x) const noexcept;
  void validate() const;
};

DenseVector project_box(const BoxConstraint& box, const DenseVector& x);
void project_box_inplace(const BoxConstraint& box, DenseVector& x) noexcept;

}  // namespace oslalm
