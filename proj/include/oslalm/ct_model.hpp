#pragma once

#include <cstdint>
#include <vector>

#include "oslalm/linalg.hpp"

namespace oslalm {

/// Square-pixel image grid centred on the origin. Pixel (i, j) has index
/// j * nx + i and centre ((i - (nx-1)/2) * pixel_size, (j - (ny-1)/2) * pixel_size).
struct ImageGrid {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double pixel_size = 1.0;
  double roi_radius = 0.0;

  /// Grid whose region of interest is the inscribed circle.
  static ImageGrid square(std::size_t n, double pixel_size = 1.0);

  std::size_t size() const noexcept { return nx * ny; }
  double center_x(std::size_t i) const noexcept;
  double center_y(std::size_t j) const noexcept;
  double half_width() const noexcept { return 0.5 * static_cast<double>(nx) * pixel_size; }
  double half_height() const noexcept { return 0.5 * static_cast<double>(ny) * pixel_size; }

  /// Throws on nx/ny = 0, non-positive pixel size or an ROI that exceeds the grid.
  void validate() const;
};

/// 2D parallel-beam scan. Ray (view v, bin b) is the line
///   p(t) = s_b (cos a_v, sin a_v) + t (-sin a_v, cos a_v),
/// with detector offset s_b = (b - (n_bins-1)/2) * bin_spacing.
struct Geometry {
  std::size_t n_views = 0;
  std::size_t n_bins = 0;
  double bin_spacing = 1.0;
  std::vector<double> angles;

  /// Views spread uniformly over [0, pi).
  static Geometry parallel(std::size_t n_views, std::size_t n_bins, double bin_spacing);

  std::size_t n_rays() const noexcept { return n_views * n_bins; }
  double bin_offset(std::size_t bin) const noexcept;
  void validate() const;
};

struct Sinogram {
  std::size_t n_views = 0;
  std::size_t n_bins = 0;
  DenseVector values;  // (view, bin) at view * n_bins + bin
};

struct Ellipse {
  double cx = 0.0;
  double cy = 0.0;
  double rx = 1.0;
  double ry = 1.0;
  double angle = 0.0;  // radians, counter-clockwise
  double density = 1.0;
};

/// Modified Shepp-Logan style head phantom scaled to the grid's field of view.
/// Densities are attenuation values in inverse length units of the grid.
std::vector<Ellipse> default_phantom(const ImageGrid& grid);

/// Pixelwise sum of ellipse densities at pixel centres, clamped at zero.
DenseVector make_phantom(const ImageGrid& grid, const std::vector<Ellipse>& ellipses);

/// Exact ray-pixel intersection lengths (Siddon). One row per (view, bin).
SparseMatrix build_system_matrix(const ImageGrid& grid, const Geometry& geo);

/// Length of the chord a ray cuts through the grid rectangle.
double chord_length(const ImageGrid& grid, const Geometry& geo, std::size_t view, std::size_t bin);

struct MeasuredData {
  DenseVector y;              // log-converted line integrals
  DiagonalOperator weights;   // detected counts, floored at 1
};

/// Transmission Poisson model: counts ~ Poisson(I0 exp(-A x_true)),
/// y = log(I0 / counts), W = counts. With noiseless set the counts equal
/// their means, which gives the I0 -> infinity limit for the sinogram.
MeasuredData synthesize_weights(const SparseMatrix& a, const DenseVector& x_true, double i0,
                                std::uint64_t seed, bool noiseless = false);

struct SubsetPartition {
  std::size_t count = 1;
  std::vector<std::size_t> view_to_subset;
  std::vector<std::size_t> visit_order;

  std::vector<std::size_t> views(std::size_t subset) const;
  /// Sinogram rows (view * n_bins + bin) belonging to a subset.
  std::vector<std::size_t> rows(std::size_t subset, std::size_t n_bins) const;
};

/// Bit-reversal permutation of 0..m-1; m is padded to the next power of two
/// and out-of-range entries are dropped.
std::vector<std::size_t> bit_reversal_order(std::size_t m);

/// View v goes to subset v mod M; subsets are visited in bit-reversal order.
SubsetPartition partition_subsets(const Geometry& geo, std::size_t m);

inline constexpr std::size_t kSamplesAxial = 40;
inline constexpr std::size_t kSamplesHelical = 24;

std::size_t max_subsets_axial(std::size_t n_views, std::size_t s_axial = kSamplesAxial);
std::size_t max_subsets_helical(double views_per_turn, double d_so, double d_sd, double pitch,
                                std::size_t s_helical = kSamplesHelical);

/// Pixels whose centres lie within roi_radius of the grid centre.
std::vector<std::uint8_t> roi_mask(const ImageGrid& grid);

/// RMS of x - x_ref over the region of interest.
double rms_diff(const DenseVector& x, const DenseVector& x_ref, const ImageGrid& grid);

}  // namespace oslalm
