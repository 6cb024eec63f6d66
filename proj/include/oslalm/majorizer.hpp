#pragma once

#include <cstdint>

#include "oslalm/linalg.hpp"

namespace oslalm {

enum class MajorizerKind { scalar, diagonal, bb_scaled_diagonal };

/// Quadratic majorizer of the AL penalty. Stored as a per-pixel curvature so
/// the scalar case is the diagonal case with a constant diagonal.
struct Majorizer {
  MajorizerKind kind = MajorizerKind::diagonal;
  DenseVector diag;    // L * 1 for scalar, L_diag otherwise
  double alpha = 1.0;  // Barzilai-Borwein scale, bb_scaled_diagonal only

  static Majorizer scalar(double lipschitz, std::size_t n);
  static Majorizer diagonal(DiagonalOperator l_diag);

  /// Curvature actually used by the x-update: alpha * diag.
  DenseVector metric() const;
  std::size_t size() const noexcept { return diag.size(); }
};

/// diag(A'WA1), with pixels that no ray touches floored to the smallest
/// positive entry so step sizes stay finite.
DiagonalOperator compute_Ldiag(const SparseMatrix& a, const DiagonalOperator& w);

inline constexpr double kBbAlphaMin = 1e-6;

/// Weighted least-squares fit of y_k ~ alpha L_diag s_k with weight L_diag^{-1}:
///   alpha = (s'y) / (s' L_diag s), clipped to [kBbAlphaMin, 1].
double bb_scale(const DiagonalOperator& l_diag, const DenseVector& s, const DenseVector& y);

struct MajorizationReport {
  std::size_t samples = 0;
  double worst_margin = 0.0;           // min over samples of |x - xbar|^2_M - |A(x - xbar)|^2_W
  double worst_relative_margin = 0.0;  // margin / |x - xbar|^2_M
  bool passed = false;
};

inline constexpr double kMajorizationTolerance = 1e-10;

/// Samples random pairs (x, xbar) and checks |A(x - xbar)|^2_W <= |x - xbar|^2_majorizer.
/// Fails when any relative margin drops below -kMajorizationTolerance.
MajorizationReport majorization_check(const SparseMatrix& a, const DiagonalOperator& w,
                                      const Majorizer& majorizer, std::size_t samples,
                                      std::uint64_t seed);

}  // namespace oslalm
