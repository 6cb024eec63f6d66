#include "oslalm/problem.hpp"

namespace oslalm {

void PwlsProblem::validate() const {
  if (weights.size() != a.rows()) throw_dimension("PwlsProblem weights", a.rows(), weights.size());
  if (y.size() != a.rows()) throw_dimension("PwlsProblem y", a.rows(), y.size());
  if (grid.size() != a.cols()) throw_dimension("PwlsProblem grid", a.cols(), grid.size());
  if (!weights.nonnegative()) throw Error(ErrorCategory::domain, "PwlsProblem: weights must be non-negative");
  reg.validate();
  box.validate();
}

double PwlsProblem::data_term(const DenseVector& x) const {
  return 0.5 * weighted_norm_sq(spmv(a, x) - y, weights);
}

DenseVector PwlsProblem::data_gradient(const DenseVector& x) const {
  return spmv_t(a, weights.apply(spmv(a, x) - y));
}

DenseVector PwlsProblem::smooth_gradient(const DenseVector& x) const {
  DenseVector g = data_gradient(x);
  if (reg.beta != 0.0) g += reg_gradient(reg, grid, x);
  return g;
}

ObjectiveValue objective(const PwlsProblem& problem, const DenseVector& x) {
  return {problem.data_term(x) + reg_value(problem.reg, problem.grid, x), problem.box.contains(x)};
}

OrderedSubsets::OrderedSubsets(const PwlsProblem& problem, const Geometry& geo, std::size_t m)
    : partition_(partition_subsets(geo, m)) {
  if (problem.a.rows() != geo.n_rays()) throw_dimension("OrderedSubsets", geo.n_rays(), problem.a.rows());
  for (std::size_t s = 0; s < m; ++s) {
    const auto rows = partition_.rows(s, geo.n_bins);
    a_.push_back(problem.a.select_rows(rows));
    DenseVector w(rows.size()), y(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      w[k] = problem.weights[rows[k]];
      y[k] = problem.y[rows[k]];
    }
    w_.emplace_back(std::move(w));
    y_.push_back(std::move(y));
  }
}

DenseVector OrderedSubsets::gradient(std::size_t m, const DenseVector& x) const {
  return spmv_t(a_[m], w_[m].apply(spmv(a_[m], x) - y_[m]));
}

std::vector<GradientFn> OrderedSubsets::gradient_functions() const {
  std::vector<GradientFn> out;
  for (std::size_t m = 0; m < count(); ++m)
    out.emplace_back([this, m](const DenseVector& x) { return gradient(m, x); });
  return out;
}

}  // namespace oslalm
