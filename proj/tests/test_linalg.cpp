#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "oslalm/linalg.hpp"
#include "test_support.hpp"

using namespace oslalm;
using oslalm::testing::random_sparse;
using oslalm::testing::to_dense;
using oslalm::testing::to_eigen;

namespace {

SparseMatrix upper_ones() { return SparseMatrix::from_dense(2, 2, std::vector<double>{1, 1, 0, 1}); }

}  // namespace

TEST(DenseVector, RejectsNonFinite) {
  EXPECT_THROW(DenseVector({1.0, std::nan("")}), Error);
  EXPECT_THROW(DenseVector({std::numeric_limits<double>::infinity()}), Error);
}

TEST(DenseVector, ArithmeticMatchesElementwise) {
  DenseVector a{1, 2, 3}, b{4, 5, 6};
  EXPECT_EQ(a + b, (DenseVector{5, 7, 9}));
  EXPECT_EQ(b - a, (DenseVector{3, 3, 3}));
  EXPECT_EQ(2.0 * a, (DenseVector{2, 4, 6}));
  EXPECT_DOUBLE_EQ(dot(a, b), 32.0);
  EXPECT_DOUBLE_EQ(norm_inf(b - 2.0 * a), 2.0);
  EXPECT_THROW(a += (DenseVector{1, 2}), Error);
}

TEST(Spmv, Identity) {
  EXPECT_EQ(spmv(SparseMatrix::identity(3), DenseVector{1, 2, 3}), (DenseVector{1, 2, 3}));
}

TEST(Spmv, HandComputedProduct) { EXPECT_EQ(spmv(upper_ones(), DenseVector{1, 1}), (DenseVector{2, 1})); }

TEST(Spmv, ZeroMatrix) {
  SparseMatrix z = SparseMatrix::from_triplets(3, 2, {});
  EXPECT_EQ(spmv(z, DenseVector{5, -7}), DenseVector(3));
}

TEST(Spmv, DimensionMismatch) {
  try {
    spmv(upper_ones(), DenseVector{1, 2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::dimension);
  }
}

TEST(SpmvT, Identity) {
  EXPECT_EQ(spmv_t(SparseMatrix::identity(3), DenseVector{4, 5, 6}), (DenseVector{4, 5, 6}));
}

TEST(SpmvT, HandComputedTransposeProduct) {
  EXPECT_EQ(spmv_t(upper_ones(), DenseVector{1, 1}), (DenseVector{1, 2}));
}

TEST(SpmvT, ZeroResidual) { EXPECT_EQ(spmv_t(upper_ones(), DenseVector(2)), DenseVector(2)); }

TEST(SpmvT, DimensionMismatch) { EXPECT_THROW(spmv_t(upper_ones(), DenseVector(3)), Error); }

TEST(SparseMatrix, TripletsSumDuplicatesAndSortColumns) {
  SparseMatrix a = SparseMatrix::from_triplets(2, 3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 3.0}, {1, 1, 5.0}});
  ASSERT_EQ(a.nnz(), 3u);
  auto cols = a.row_indices(0);
  ASSERT_EQ(cols.size(), 2u);
  EXPECT_EQ(cols[0], 0u);
  EXPECT_EQ(cols[1], 2u);
  EXPECT_DOUBLE_EQ(a.row_values(0)[1], 4.0);
  EXPECT_THROW(SparseMatrix::from_triplets(2, 2, {{0, 2, 1.0}}), Error);
}

TEST(SparseMatrix, RandomProductMatchesDenseOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const SparseMatrix a = random_sparse(37, 23, 0.2, rng);
    const Eigen::MatrixXd dense = to_dense(a);
    std::normal_distribution<double> nd;
    DenseVector x(23), r(37);
    for (double& v : x) v = nd(rng);
    for (double& v : r) v = nd(rng);
    const Eigen::VectorXd ax = dense * to_eigen(x);
    const Eigen::VectorXd atr = dense.transpose() * to_eigen(r);
    const DenseVector ax_lib = spmv(a, x), atr_lib = spmv_t(a, r);
    for (int i = 0; i < 37; ++i) EXPECT_NEAR(ax_lib[i], ax[i], 1e-12);
    for (int i = 0; i < 23; ++i) EXPECT_NEAR(atr_lib[i], atr[i], 1e-12);
  }
}

TEST(SparseMatrix, AdjointnessUpTo200) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dim(1, 200);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = dim(rng), n = dim(rng);
    const SparseMatrix a = random_sparse(m, n, 0.05, rng);
    DenseVector x(n), r(m);
    for (double& v : x) v = nd(rng);
    for (double& v : r) v = nd(rng);
    const double lhs = dot(spmv(a, x), r), rhs = dot(x, spmv_t(a, r));
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(WeightedNormSq, Examples) {
  EXPECT_DOUBLE_EQ(weighted_norm_sq(DenseVector{1, 1}, DiagonalOperator::identity(2)), 2.0);
  EXPECT_DOUBLE_EQ(weighted_norm_sq(DenseVector{1, 2}, DiagonalOperator(DenseVector{2, 3})), 14.0);
  EXPECT_DOUBLE_EQ(weighted_norm_sq(DenseVector(4), DiagonalOperator(DenseVector{1, 2, 3, 4})), 0.0);
  EXPECT_THROW(weighted_norm_sq(DenseVector(3), DiagonalOperator::identity(2)), Error);
}

TEST(WeightedNormSq, IdentityIsSquaredNorm) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  DenseVector v(50);
  for (double& x : v) x = nd(rng);
  EXPECT_NEAR(weighted_norm_sq(v, DiagonalOperator::identity(50)), norm2(v) * norm2(v), 1e-12);
}

TEST(SpectralBound, Diagonal) {
  SparseMatrix a = SparseMatrix::from_dense(2, 2, std::vector<double>{2, 0, 0, 1});
  EXPECT_NEAR(spectral_bound(a, DiagonalOperator::identity(2)), 4.0 * kSpectralSafety, 1e-8);
}

TEST(SpectralBound, Identity) {
  EXPECT_NEAR(spectral_bound(SparseMatrix::identity(5), DiagonalOperator::identity(5)), 1.01, 1e-10);
}

TEST(SpectralBound, UpperTriangularOnes) {
  const double lambda = (3.0 + std::sqrt(5.0)) / 2.0;
  EXPECT_NEAR(spectral_bound(upper_ones(), DiagonalOperator::identity(2)), lambda * 1.01, 1e-7);
}

TEST(SpectralBound, NonConvergenceCarriesEstimate) {
  std::mt19937_64 rng(2);
  const SparseMatrix a = random_sparse(60, 60, 0.3, rng);
  try {
    estimate_spectrum(a, DiagonalOperator::identity(60), 1, 1e-15);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.last_estimate(), 0.0);
  }
}

TEST(SpectralBound, MatchesEigenAndMajorizes) {
  std::mt19937_64 rng(17);
  const SparseMatrix a = random_sparse(80, 40, 0.15, rng);
  DenseVector wv(80);
  std::uniform_real_distribution<double> ud(0.5, 3.0);
  for (double& v : wv) v = ud(rng);
  const DiagonalOperator w(wv);
  const Eigen::MatrixXd dense = to_dense(a);
  const Eigen::MatrixXd h = dense.transpose() * to_eigen(wv).asDiagonal() * dense;
  const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().maxCoeff();
  const double l = spectral_bound(a, w, 5000, 1e-12);
  EXPECT_NEAR(l, lmax * kSpectralSafety, 1e-6 * lmax);

  std::normal_distribution<double> nd;
  for (int k = 0; k < 1000; ++k) {
    DenseVector x(40);
    for (double& v : x) v = nd(rng);
    x *= 1.0 / norm2(x);
    EXPECT_LT(weighted_norm_sq(spmv(a, x), w), l);
  }
}
