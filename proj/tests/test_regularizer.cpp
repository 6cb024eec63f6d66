#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "oslalm/regularizer.hpp"
#include "test_support.hpp"

using namespace oslalm;
using oslalm::testing::random_vector;

namespace {

RegularizerConfig quad(double beta) { return {beta, {PotentialKind::quadratic, 1.0}}; }
RegularizerConfig fair(double beta, double delta) { return {beta, {PotentialKind::fair, delta}}; }

ImageGrid rect(std::size_t nx, std::size_t ny) {
  ImageGrid g;
  g.nx = nx;
  g.ny = ny;
  g.pixel_size = 1.0;
  g.roi_radius = 0.5 * static_cast<double>(std::min(nx, ny));
  return g;
}

// Explicit Hessian of beta * sum psi(x_j - x_k) over 4-neighbour pairs.
Eigen::MatrixXd explicit_hessian(const RegularizerConfig& cfg, const ImageGrid& g, const DenseVector& x) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  auto add_pair = [&](std::size_t j, std::size_t k) {
    const double c = cfg.beta * cfg.potential.curvature(x[j] - x[k]);
    const auto a = static_cast<Eigen::Index>(j), b = static_cast<Eigen::Index>(k);
    h(a, a) += c;
    h(b, b) += c;
    h(a, b) -= c;
    h(b, a) -= c;
  };
  for (std::size_t r = 0; r < g.ny; ++r)
    for (std::size_t c = 0; c < g.nx; ++c) {
      const std::size_t p = r * g.nx + c;
      if (c + 1 < g.nx) add_pair(p, p + 1);
      if (r + 1 < g.ny) add_pair(p, p + g.nx);
    }
  return h;
}

DenseVector finite_difference_gradient(const RegularizerConfig& cfg, const ImageGrid& g, const DenseVector& x,
                                       double step) {
  DenseVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    DenseVector xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    out[i] = (reg_value(cfg, g, xp) - reg_value(cfg, g, xm)) / (2.0 * step);
  }
  return out;
}

}  // namespace

TEST(Potential, FairShape) {
  const Potential p{PotentialKind::fair, 0.5};
  EXPECT_EQ(p.value(0.0), 0.0);
  EXPECT_DOUBLE_EQ(p.value(0.3), p.value(-0.3));
  EXPECT_NEAR(p.value(0.3), 0.25 * (0.6 - std::log(1.6)), 1e-15);
  EXPECT_NEAR(p.derivative(0.3), 0.3 / 1.6, 1e-15);
  EXPECT_NEAR(p.curvature(0.3), 1.0 / (1.6 * 1.6), 1e-15);
  for (double t : {-5.0, -0.1, 0.0, 0.2, 7.0}) {
    EXPECT_LE(p.curvature(t), 1.0);
    EXPECT_GT(p.curvature(t), 0.0);
  }
}

TEST(RegValue, ConstantImageIsZero) {
  const ImageGrid g = ImageGrid::square(5);
  EXPECT_EQ(reg_value(fair(3.0, 0.1), g, DenseVector(25, 0.7)), 0.0);
  EXPECT_EQ(reg_value(quad(3.0), g, DenseVector(25, 0.7)), 0.0);
}

TEST(RegValue, SinglePairQuadratic) {
  const ImageGrid g = rect(2, 1);
  EXPECT_NEAR(reg_value(quad(2.5), g, DenseVector{1.5, -0.5}), 2.5 * 4.0 / 2.0, 1e-14);
}

TEST(RegValue, FairApproachesQuadratic) {
  const ImageGrid g = ImageGrid::square(6);
  std::mt19937_64 rng(4);
  const DenseVector x = random_vector(g.size(), rng);
  double max_diff = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) max_diff = std::max(max_diff, std::abs(x[i + 1] - x[i]));
  max_diff = std::max(max_diff, 2.0);
  const double q = reg_value(quad(1.0), g, x), f = reg_value(fair(1.0, 100.0 * max_diff), g, x);
  EXPECT_NEAR(f, q, 0.01 * q);
}

TEST(RegValue, NonNegative) {
  const ImageGrid g = ImageGrid::square(8);
  std::mt19937_64 rng(9);
  for (int k = 0; k < 20; ++k) EXPECT_GE(reg_value(fair(1.0, 0.05), g, random_vector(g.size(), rng)), 0.0);
}

TEST(RegGradient, ConstantImageIsZero) {
  const ImageGrid g = ImageGrid::square(4);
  EXPECT_EQ(reg_gradient(fair(2.0, 0.1), g, DenseVector(16, 3.0)), DenseVector(16));
}

TEST(RegGradient, SinglePairQuadratic) {
  const ImageGrid g = rect(2, 1);
  const DenseVector grad = reg_gradient(quad(3.0), g, DenseVector{2.0, 0.5});
  EXPECT_NEAR(grad[0], 3.0 * 1.5, 1e-14);
  EXPECT_NEAR(grad[1], -3.0 * 1.5, 1e-14);
}

TEST(RegGradient, MatchesFiniteDifferences8x8) {
  const ImageGrid g = ImageGrid::square(8);
  std::mt19937_64 rng(21);
  for (const RegularizerConfig& cfg : {quad(1.7), fair(1.7, 0.3)}) {
    const DenseVector x = random_vector(g.size(), rng);
    const DenseVector fd = finite_difference_gradient(cfg, g, x, 1e-5);
    EXPECT_LE(norm2(reg_gradient(cfg, g, x) - fd), 1e-6 * norm2(fd));
  }
}

TEST(RegCurvature, InteriorEdgeCorner) {
  const ImageGrid g = ImageGrid::square(4);
  const DiagonalOperator d = reg_curvature_diag(quad(1.5), g);
  EXPECT_DOUBLE_EQ(d[5], 8.0 * 1.5);   // interior
  EXPECT_DOUBLE_EQ(d[1], 6.0 * 1.5);   // edge
  EXPECT_DOUBLE_EQ(d[0], 4.0 * 1.5);   // corner
  EXPECT_LT(d[0], d[5]);
  EXPECT_EQ(reg_curvature_diag(quad(0.0), g).diag(), DenseVector(16));
}

TEST(RegCurvature, GershgorinRowSums) {
  const ImageGrid g = ImageGrid::square(4);
  const RegularizerConfig cfg = quad(0.8);
  const Eigen::MatrixXd h = explicit_hessian(cfg, g, DenseVector(16));
  const DiagonalOperator d = reg_curvature_diag(cfg, g);
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    EXPECT_NEAR(d[static_cast<std::size_t>(i)], h.row(i).cwiseAbs().sum(), 1e-14);
}

TEST(RegCurvature, DominatesHessian) {
  const ImageGrid g = rect(5, 4);
  std::mt19937_64 rng(8);
  for (const RegularizerConfig& cfg : {quad(2.0), fair(2.0, 0.05)}) {
    const DiagonalOperator d = reg_curvature_diag(cfg, g);
    for (int k = 0; k < 50; ++k) {
      const DenseVector x = random_vector(g.size(), rng);
      const Eigen::MatrixXd h = explicit_hessian(cfg, g, x);
      const DenseVector v = random_vector(g.size(), rng);
      const Eigen::VectorXd ve = oslalm::testing::to_eigen(v);
      EXPECT_LE(ve.dot(h * ve), weighted_norm_sq(v, d) + 1e-12);
    }
  }
}

TEST(ProjectBox, Examples) {
  const BoxConstraint nonneg{};
  EXPECT_EQ(project_box(nonneg, DenseVector{0.5, 2.0}), (DenseVector{0.5, 2.0}));
  EXPECT_EQ(project_box(nonneg, DenseVector{-1.0, 2.0}), (DenseVector{0.0, 2.0}));
  const BoxConstraint band{-0.5, 0.5};
  std::mt19937_64 rng(2);
  const DenseVector x = random_vector(30, rng, -3.0, 3.0);
  const DenseVector once = project_box(band, x);
  EXPECT_EQ(project_box(band, once), once);
  EXPECT_TRUE(band.contains(once));
  EXPECT_THROW((BoxConstraint{1.0, 0.0}.validate()), Error);
}

TEST(RegularizerProperties, Convexity) {
  const ImageGrid g = ImageGrid::square(6);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  const RegularizerConfig cfg = fair(1.3, 0.02);
  for (int k = 0; k < 200; ++k) {
    const DenseVector x1 = random_vector(g.size(), rng), x2 = random_vector(g.size(), rng);
    const double t = ut(rng);
    const DenseVector mix = t * x1 + (1.0 - t) * x2;
    EXPECT_LE(reg_value(cfg, g, mix), t * reg_value(cfg, g, x1) + (1.0 - t) * reg_value(cfg, g, x2) + 1e-9);
  }
}

TEST(RegularizerProperties, GradientFiniteDifferences100Images) {
  const ImageGrid g = ImageGrid::square(6);
  std::mt19937_64 rng(77);
  const RegularizerConfig cfg = fair(2.0, 0.1);
  for (int k = 0; k < 100; ++k) {
    const DenseVector x = random_vector(g.size(), rng);
    const DenseVector fd = finite_difference_gradient(cfg, g, x, 1e-6);
    EXPECT_LE(norm2(reg_gradient(cfg, g, x) - fd), 1e-5 * norm2(fd));
  }
}

TEST(RegularizerConfig, Validation) {
  EXPECT_THROW(fair(-1.0, 0.1).validate(), Error);
  EXPECT_THROW(fair(1.0, 0.0).validate(), Error);
  EXPECT_NO_THROW(quad(0.0).validate());
}
