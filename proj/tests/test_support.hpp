#pragma once

// Shared helpers for the unit and acceptance suites: Eigen conversions and
// small seeded problems.

#include <Eigen/Dense>

#include <random>
#include <vector>

#include "oslalm/ct_model.hpp"
#include "oslalm/linalg.hpp"
#include "oslalm/problem.hpp"

namespace oslalm::testing {

inline Eigen::VectorXd to_eigen(const DenseVector& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

inline DenseVector from_eigen(const Eigen::VectorXd& v) {
  return DenseVector(std::vector<double>(v.data(), v.data() + v.size()));
}

inline Eigen::MatrixXd to_dense(const SparseMatrix& a) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.rows()),
                                               static_cast<Eigen::Index>(a.cols()));
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto cols = a.row_indices(r);
    auto vals = a.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(cols[k])) = vals[k];
  }
  return out;
}

inline SparseMatrix random_sparse(std::size_t m, std::size_t n, double density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::normal_distribution<double> nd;
  std::vector<SparseMatrix::Triplet> t;
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (ud(rng) < density) t.push_back({r, c, nd(rng)});
  return SparseMatrix::from_triplets(m, n, std::move(t));
}

inline DenseVector random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> ud(lo, hi);
  DenseVector v(n);
  for (double& x : v) x = ud(rng);
  return v;
}

/// Small noiseless-weighted PWLS problem on an n x n grid.
inline PwlsProblem small_pwls(std::size_t n, std::size_t views, double beta, double delta,
                              std::uint64_t seed, Geometry* geo_out = nullptr) {
  PwlsProblem p;
  p.grid = ImageGrid::square(n, 1.0);
  const Geometry geo = Geometry::parallel(views, n + n / 2, 1.0);
  p.a = build_system_matrix(p.grid, geo);
  const DenseVector truth = make_phantom(p.grid, default_phantom(p.grid));
  MeasuredData m = synthesize_weights(p.a, truth, 1e4, seed);
  p.y = std::move(m.y);
  p.weights = std::move(m.weights);
  p.reg.beta = beta;
  p.reg.potential = {PotentialKind::fair, delta};
  p.box = BoxConstraint{};
  if (geo_out) *geo_out = geo;
  return p;
}

}  // namespace oslalm::testing
