#include "oslalm/ct_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace oslalm {

ImageGrid ImageGrid::square(std::size_t n, double pixel_size) {
  ImageGrid g{n, n, pixel_size, 0.5 * static_cast<double>(n) * pixel_size};
  g.validate();
  return g;
}

double ImageGrid::center_x(std::size_t i) const noexcept {
  return (static_cast<double>(i) - 0.5 * static_cast<double>(nx - 1)) * pixel_size;
}

double ImageGrid::center_y(std::size_t j) const noexcept {
  return (static_cast<double>(j) - 0.5 * static_cast<double>(ny - 1)) * pixel_size;
}

void ImageGrid::validate() const {
  if (nx < 1 || ny < 1) throw Error(ErrorCategory::domain, "ImageGrid: nx and ny must be >= 1");
  if (!(pixel_size > 0.0)) throw Error(ErrorCategory::domain, "ImageGrid: pixel_size must be positive");
  const double limit = 0.5 * static_cast<double>(std::min(nx, ny)) * pixel_size;
  if (!(roi_radius >= 0.0) || roi_radius > limit * (1.0 + 1e-12))
    throw Error(ErrorCategory::domain, "ImageGrid: roi_radius exceeds half the grid extent");
}

Geometry Geometry::parallel(std::size_t n_views, std::size_t n_bins, double bin_spacing) {
  Geometry g;
  g.n_views = n_views;
  g.n_bins = n_bins;
  g.bin_spacing = bin_spacing;
  g.angles.resize(n_views);
  for (std::size_t v = 0; v < n_views; ++v)
    g.angles[v] = std::numbers::pi * static_cast<double>(v) / static_cast<double>(n_views);
  g.validate();
  return g;
}

double Geometry::bin_offset(std::size_t bin) const noexcept {
  return (static_cast<double>(bin) - 0.5 * static_cast<double>(n_bins - 1)) * bin_spacing;
}

void Geometry::validate() const {
  if (n_views < 1) throw Error(ErrorCategory::domain, "Geometry: n_views must be >= 1");
  if (n_bins < 1) throw Error(ErrorCategory::domain, "Geometry: n_bins must be >= 1");
  if (!(bin_spacing > 0.0)) throw Error(ErrorCategory::domain, "Geometry: bin_spacing must be positive");
  if (angles.size() != n_views) throw_dimension("Geometry angles", n_views, angles.size());
  for (std::size_t v = 1; v < n_views; ++v)
    if (!(angles[v] > angles[v - 1]))
      throw Error(ErrorCategory::domain, "Geometry: angles must be strictly increasing");
}

// ---------------------------------------------------------------------------

std::vector<Ellipse> default_phantom(const ImageGrid& grid) {
  // Modified Shepp-Logan layout on the unit disc; skull 0.04, brain 0.02.
  struct Unit {
    double x0, y0, a, b, deg, d;
  };
  static constexpr Unit kUnits[] = {
      {0.0, 0.0, 0.69, 0.92, 0.0, 0.040},       {0.0, -0.0184, 0.6624, 0.874, 0.0, -0.020},
      {0.22, 0.0, 0.11, 0.31, -18.0, -0.004},   {-0.22, 0.0, 0.16, 0.41, 18.0, -0.004},
      {0.0, 0.35, 0.21, 0.25, 0.0, 0.002},      {0.0, 0.1, 0.046, 0.046, 0.0, 0.002},
      {0.0, -0.1, 0.046, 0.046, 0.0, 0.002},    {-0.08, -0.605, 0.046, 0.023, 0.0, 0.002},
      {0.0, -0.606, 0.023, 0.023, 0.0, 0.002},  {0.06, -0.605, 0.023, 0.046, 0.0, 0.002},
  };
  const double scale = 0.95 * std::min(grid.half_width(), grid.half_height());
  std::vector<Ellipse> out;
  for (const auto& u : kUnits)
    out.push_back({u.x0 * scale, u.y0 * scale, u.a * scale, u.b * scale,
                   u.deg * std::numbers::pi / 180.0, u.d});
  return out;
}

DenseVector make_phantom(const ImageGrid& grid, const std::vector<Ellipse>& ellipses) {
  grid.validate();
  DenseVector img(grid.size());
  for (const auto& e : ellipses) {
    if (!(e.rx > 0.0) || !(e.ry > 0.0)) throw Error(ErrorCategory::domain, "make_phantom: ellipse radii must be positive");
    const double c = std::cos(e.angle), s = std::sin(e.angle);
    for (std::size_t j = 0; j < grid.ny; ++j) {
      for (std::size_t i = 0; i < grid.nx; ++i) {
        const double dx = grid.center_x(i) - e.cx, dy = grid.center_y(j) - e.cy;
        const double u = (c * dx + s * dy) / e.rx;
        const double v = (-s * dx + c * dy) / e.ry;
        if (u * u + v * v <= 1.0) img[j * grid.nx + i] += e.density;
      }
    }
  }
  for (double& v : img) v = std::max(v, 0.0);
  return img;
}

// ---------------------------------------------------------------------------

namespace {

struct RaySpan {
  double px, py;  // point on the ray at t = 0
  double dx, dy;  // unit direction
  double t_in, t_out;
  bool hits;
};

constexpr double kAxisEps = 1e-14;

// Clip the ray against [xmin, xmax) x [ymin, ymax).
RaySpan clip_ray(const ImageGrid& grid, const Geometry& geo, std::size_t view, std::size_t bin) {
  const double a = geo.angles[view];
  const double s = geo.bin_offset(bin);
  RaySpan r{s * std::cos(a), s * std::sin(a), -std::sin(a), std::cos(a), -INFINITY, INFINITY, true};
  const double xmin = -grid.half_width(), xmax = grid.half_width();
  const double ymin = -grid.half_height(), ymax = grid.half_height();

  auto clip_axis = [&](double p, double d, double lo, double hi) {
    if (std::abs(d) < kAxisEps) {
      if (p < lo || p >= hi) r.hits = false;
      return;
    }
    double t1 = (lo - p) / d, t2 = (hi - p) / d;
    if (t1 > t2) std::swap(t1, t2);
    r.t_in = std::max(r.t_in, t1);
    r.t_out = std::min(r.t_out, t2);
  };
  clip_axis(r.px, r.dx, xmin, xmax);
  clip_axis(r.py, r.dy, ymin, ymax);
  if (!(r.t_out > r.t_in)) r.hits = false;
  return r;
}

}  // namespace

double chord_length(const ImageGrid& grid, const Geometry& geo, std::size_t view, std::size_t bin) {
  const RaySpan r = clip_ray(grid, geo, view, bin);
  return r.hits ? r.t_out - r.t_in : 0.0;
}

SparseMatrix build_system_matrix(const ImageGrid& grid, const Geometry& geo) {
  grid.validate();
  geo.validate();
  const double ps = grid.pixel_size;
  const double xmin = -grid.half_width(), ymin = -grid.half_height();

  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col_idx;
  std::vector<double> values;
  std::vector<double> ts;
  std::vector<std::pair<std::uint32_t, double>> row;

  for (std::size_t v = 0; v < geo.n_views; ++v) {
    for (std::size_t b = 0; b < geo.n_bins; ++b) {
      const RaySpan r = clip_ray(grid, geo, v, b);
      row.clear();
      if (r.hits) {
        ts.clear();
        ts.push_back(r.t_in);
        ts.push_back(r.t_out);
        // Parametric crossings with the interior pixel boundaries.
        auto add_planes = [&](double p, double d, double lo, std::size_t n) {
          if (std::abs(d) < kAxisEps) return;
          for (std::size_t k = 1; k < n; ++k) {
            const double t = (lo + static_cast<double>(k) * ps - p) / d;
            if (t > r.t_in && t < r.t_out) ts.push_back(t);
          }
        };
        add_planes(r.px, r.dx, xmin, grid.nx);
        add_planes(r.py, r.dy, ymin, grid.ny);
        std::sort(ts.begin(), ts.end());

        for (std::size_t k = 1; k < ts.size(); ++k) {
          const double len = ts[k] - ts[k - 1];
          if (len <= 1e-12 * ps) continue;
          const double tm = 0.5 * (ts[k] + ts[k - 1]);
          const double mx = r.px + tm * r.dx, my = r.py + tm * r.dy;
          auto i = static_cast<long>(std::floor((mx - xmin) / ps));
          auto j = static_cast<long>(std::floor((my - ymin) / ps));
          i = std::clamp(i, 0L, static_cast<long>(grid.nx) - 1);
          j = std::clamp(j, 0L, static_cast<long>(grid.ny) - 1);
          row.emplace_back(static_cast<std::uint32_t>(j * static_cast<long>(grid.nx) + i), len);
        }
        std::sort(row.begin(), row.end());
        // A segment split by a plane crossing at a pixel corner can land in the
        // same pixel twice; merge those.
        std::size_t out = 0;
        for (std::size_t k = 0; k < row.size(); ++k) {
          if (out > 0 && row[out - 1].first == row[k].first)
            row[out - 1].second += row[k].second;
          else
            row[out++] = row[k];
        }
        row.resize(out);
      }
      for (const auto& [c, len] : row) {
        col_idx.push_back(c);
        values.push_back(len);
      }
      row_ptr.push_back(col_idx.size());
    }
  }
  return SparseMatrix(geo.n_rays(), grid.size(), std::move(row_ptr), std::move(col_idx),
                      std::move(values));
}

// ---------------------------------------------------------------------------

MeasuredData synthesize_weights(const SparseMatrix& a, const DenseVector& x_true, double i0,
                                std::uint64_t seed, bool noiseless) {
  if (!(i0 > 0.0)) throw Error(ErrorCategory::domain, "synthesize_weights: I0 must be positive");
  const DenseVector t = spmv(a, x_true);
  DenseVector y(t.size()), w(t.size());
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double mean = i0 * std::exp(-t[i]);
    double counts = mean;
    if (!noiseless) {
      std::poisson_distribution<long long> draw(mean);
      counts = static_cast<double>(draw(rng));
    }
    counts = std::max(counts, 1.0);
    w[i] = counts;
    y[i] = std::log(i0 / counts);
  }
  return {std::move(y), DiagonalOperator(std::move(w))};
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> SubsetPartition::views(std::size_t subset) const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < view_to_subset.size(); ++v)
    if (view_to_subset[v] == subset) out.push_back(v);
  return out;
}

std::vector<std::size_t> SubsetPartition::rows(std::size_t subset, std::size_t n_bins) const {
  std::vector<std::size_t> out;
  for (std::size_t v : views(subset))
    for (std::size_t b = 0; b < n_bins; ++b) out.push_back(v * n_bins + b);
  return out;
}

std::vector<std::size_t> bit_reversal_order(std::size_t m) {
  if (m == 0) return {};
  const std::size_t padded = std::bit_ceil(m);
  const int bits = std::countr_zero(padded);
  std::vector<std::size_t> order;
  order.reserve(m);
  for (std::size_t i = 0; i < padded; ++i) {
    std::size_t rev = 0;
    for (int b = 0; b < bits; ++b)
      if (i & (std::size_t{1} << b)) rev |= std::size_t{1} << (bits - 1 - b);
    if (rev < m) order.push_back(rev);
  }
  return order;
}

SubsetPartition partition_subsets(const Geometry& geo, std::size_t m) {
  if (m < 1 || m > geo.n_views) {
    std::ostringstream os;
    os << "partition_subsets: need 1 <= M <= n_views (" << geo.n_views << "), got " << m;
    throw Error(ErrorCategory::domain, os.str());
  }
  SubsetPartition p;
  p.count = m;
  p.view_to_subset.resize(geo.n_views);
  for (std::size_t v = 0; v < geo.n_views; ++v) p.view_to_subset[v] = v % m;
  p.visit_order = bit_reversal_order(m);
  return p;
}

std::size_t max_subsets_axial(std::size_t n_views, std::size_t s_axial) {
  if (s_axial < 1) throw Error(ErrorCategory::domain, "max_subsets_axial: s_axial must be >= 1");
  return std::max<std::size_t>(1, n_views / s_axial);
}

std::size_t max_subsets_helical(double views_per_turn, double d_so, double d_sd, double pitch,
                                std::size_t s_helical) {
  if (!(views_per_turn > 0) || !(d_so > 0) || !(d_sd > 0) || !(pitch > 0) || s_helical < 1)
    throw Error(ErrorCategory::domain, "max_subsets_helical: inputs must be positive");
  const double m = views_per_turn * d_so / (pitch * static_cast<double>(s_helical) * d_sd);
  // Guard exact-integer ratios against round-off just below the integer.
  const double f = std::floor(m * (1.0 + 1e-12));
  return std::max<std::size_t>(1, static_cast<std::size_t>(f));
}

std::vector<std::uint8_t> roi_mask(const ImageGrid& grid) {
  std::vector<std::uint8_t> mask(grid.size(), 0);
  const double r2 = grid.roi_radius * grid.roi_radius;
  for (std::size_t j = 0; j < grid.ny; ++j)
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const double x = grid.center_x(i), y = grid.center_y(j);
      mask[j * grid.nx + i] = (x * x + y * y <= r2) ? 1 : 0;
    }
  return mask;
}

double rms_diff(const DenseVector& x, const DenseVector& x_ref, const ImageGrid& grid) {
  if (x.size() != grid.size()) throw_dimension("rms_diff x", grid.size(), x.size());
  if (x_ref.size() != grid.size()) throw_dimension("rms_diff x_ref", grid.size(), x_ref.size());
  const auto mask = roi_mask(grid);
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!mask[k]) continue;
    const double d = x[k] - x_ref[k];
    acc += d * d;
    ++n;
  }
  if (n == 0) throw Error(ErrorCategory::domain, "rms_diff: region of interest is empty");
  return std::sqrt(acc / static_cast<double>(n));
}

}  // namespace oslalm
