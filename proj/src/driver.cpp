#include "oslalm/driver.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

namespace oslalm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_number(double v) { return fmt::format("{}", v); }

std::string compact(double v) { return fmt::format("{:g}", v); }

double parse_field(const std::string& field, std::size_t line) {
  if (field == "nan") return kNaN;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != field.size() || field.empty())
    throw Error(ErrorCategory::data, fmt::format("convergence log line {}: bad number '{}'", line, field));
  return v;
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::os_lalm: return "os-lalm";
    case Algorithm::ista: return "ista";
    case Algorithm::os_sqs: return "os-sqs";
    case Algorithm::os_nes05: return "os-nes05";
    case Algorithm::os_rnes05: return "os-rnes05";
    case Algorithm::fista: return "fista";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::os_lalm, Algorithm::ista, Algorithm::os_sqs, Algorithm::os_nes05,
                      Algorithm::os_rnes05, Algorithm::fista})
    if (to_string(a) == name) return a;
  throw Error(ErrorCategory::config, "unknown algorithm '" + name + "'");
}

void SolverOptions::validate() const {
  if (subsets < 1) throw Error(ErrorCategory::config, "subsets must be >= 1");
  if (n_inner < 1) throw Error(ErrorCategory::config, "n_inner must be >= 1");
  if (max_epochs < 0) throw Error(ErrorCategory::config, "max_epochs must be >= 0");
  if (!(rho_fixed > 0.0 && rho_fixed <= 1.0)) throw Error(ErrorCategory::config, "rho must lie in (0, 1]");
  if (!(rho_min > 0.0 && rho_min <= 1.0)) throw Error(ErrorCategory::config, "rho_min must lie in (0, 1]");
  if (!(gamma >= 0.0)) throw Error(ErrorCategory::config, "gamma must be >= 0");
  if (bb && majorizer == MajorizerKind::scalar)
    throw Error(ErrorCategory::config, "BB scaling needs a diagonal majorizer");
}

std::string run_name(const SolverOptions& o) {
  switch (o.algorithm) {
    case Algorithm::os_lalm: {
      const std::string bb = o.bb || o.majorizer == MajorizerKind::bb_scaled_diagonal ? "-bb" : "";
      if (o.mode == RhoMode::continuation) return fmt::format("OS-LALM-{}-c-{}{}", o.subsets, o.n_inner, bb);
      return fmt::format("OS-LALM-{}-{}-{}{}", o.subsets, compact(o.rho_fixed), o.n_inner, bb);
    }
    case Algorithm::ista: return "ISTA";
    case Algorithm::os_sqs: return fmt::format("OS-SQS-{}", o.subsets);
    case Algorithm::os_nes05: return fmt::format("OS-Nes05-{}", o.subsets);
    case Algorithm::os_rnes05: return fmt::format("OS-rNes05-{}-{}", o.subsets, compact(o.gamma));
    case Algorithm::fista: return "FISTA";
  }
  return "unknown";
}

std::string ConvergenceLog::to_csv() const {
  std::string out = std::string(kHeader) + "\n";
  for (const LogRow& r : rows)
    out += fmt::format("{},{},{},{},{},{},{}\n", r.epoch, r.inner, format_number(r.rho),
                       r.restarted ? 1 : 0, format_number(r.objective), format_number(r.rmsd),
                       format_number(r.seconds));
  return out;
}

ConvergenceLog ConvergenceLog::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw Error(ErrorCategory::data, "convergence log: missing or unexpected header");
  ConvergenceLog log;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 7)
      throw Error(ErrorCategory::data, fmt::format("convergence log line {}: expected 7 fields", lineno));
    LogRow r;
    r.epoch = static_cast<std::size_t>(parse_field(f[0], lineno));
    r.inner = static_cast<std::size_t>(parse_field(f[1], lineno));
    r.rho = parse_field(f[2], lineno);
    r.restarted = parse_field(f[3], lineno) != 0.0;
    r.objective = parse_field(f[4], lineno);
    r.rmsd = parse_field(f[5], lineno);
    r.seconds = parse_field(f[6], lineno);
    log.rows.push_back(r);
  }
  return log;
}

void ConvergenceLog::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::io, "cannot write " + path.string());
  out << to_csv();
  if (!out) throw Error(ErrorCategory::io, "write failed: " + path.string());
}

ConvergenceLog ConvergenceLog::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::io, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_csv(buf.str());
}

std::vector<double> ConvergenceLog::rmsd_per_epoch() const {
  std::vector<double> out;
  for (const LogRow& r : rows) {
    if (r.epoch >= out.size()) out.resize(r.epoch + 1, kNaN);
    out[r.epoch] = r.rmsd;
  }
  return out;
}

std::size_t ConvergenceLog::restart_count() const {
  std::size_t n = 0;
  for (const LogRow& r : rows) n += r.restarted ? 1 : 0;
  return n;
}

RunResult run_reconstruction(const PwlsProblem& problem, const Geometry& geo,
                             const SolverOptions& options, const DenseVector& x0,
                             const DenseVector* reference) {
  options.validate();
  problem.validate();
  if (x0.size() != problem.n_pixels()) throw_dimension("run_reconstruction x0", problem.n_pixels(), x0.size());
  if (reference && reference->size() != problem.n_pixels())
    throw_dimension("run_reconstruction reference", problem.n_pixels(), reference->size());

  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  auto log_row = [&](const DenseVector& x, std::size_t epoch, std::size_t inner, double rho,
                     bool restarted) {
    LogRow r;
    r.epoch = epoch;
    r.inner = inner;
    r.rho = rho;
    r.restarted = restarted;
    r.objective = objective(problem, x).value;
    r.rmsd = reference ? rms_diff(x, *reference, problem.grid) : kNaN;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.rows.push_back(r);
  };

  const bool lalm_family = options.algorithm == Algorithm::os_lalm;
  const double rho0 = !lalm_family ? kNaN : options.mode == RhoMode::continuation ? 1.0 : options.rho_fixed;
  log_row(x0, 0, 0, rho0, false);
  const auto epochs = static_cast<std::size_t>(options.max_epochs);
  if (epochs == 0) {
    result.x = x0;
    return result;
  }

  const std::size_t m_count = (options.algorithm == Algorithm::ista || options.algorithm == Algorithm::fista)
                                  ? 1
                                  : options.subsets;
  const OrderedSubsets subsets(problem, geo, m_count);
  const std::vector<GradientFn> grads = subsets.gradient_functions();
  const std::vector<std::size_t>& order = subsets.visit_order();
  const DiagonalOperator l_diag = compute_Ldiag(problem.a, problem.weights);

  auto make_majorizer = [&]() {
    if (options.majorizer == MajorizerKind::scalar)
      return Majorizer::scalar(spectral_bound(problem.a, problem.weights), problem.n_pixels());
    return Majorizer::diagonal(l_diag);
  };

  switch (options.algorithm) {
    case Algorithm::os_lalm: {
      const RegularizedBox h(problem.reg, problem.grid, problem.box, options.n_inner);
      const Majorizer maj = make_majorizer();
      RhoSchedule schedule;
      schedule.mode = options.mode;
      schedule.rho_fixed = options.rho_fixed;
      schedule.rho_min = options.rho_min;
      schedule.bb = options.bb || options.majorizer == MajorizerKind::bb_scaled_diagonal;
      DenseVector g0 = grads[order.front()](x0);
      g0 *= static_cast<double>(m_count);
      SolverState st = init_solver_state(x0, std::move(g0));
      for (std::size_t e = 0; e < epochs; ++e) {
        oslalm_epoch(st, grads, order, h, maj, schedule, [&](const SolverState& s, bool restarted) {
          log_row(s.x, e + 1, s.inner_index, s.rho, restarted);
        });
      }
      result.x = std::move(st.x);
      break;
    }
    case Algorithm::ista: {
      const RegularizedBox h(problem.reg, problem.grid, problem.box, options.n_inner);
      const Majorizer maj = make_majorizer();
      DenseVector x = x0;
      for (std::size_t e = 0; e < epochs; ++e) {
        x = ista_step(x, grads.front(), h, maj);
        log_row(x, e + 1, 1, kNaN, false);
      }
      result.x = std::move(x);
      break;
    }
    case Algorithm::os_sqs: {
      const DenseVector denom = sqs_denominator(l_diag, problem.reg, problem.grid);
      DenseVector x = x0;
      for (std::size_t e = 0; e < epochs; ++e)
        os_sqs_epoch(x, grads, order, problem.reg, problem.grid, problem.box, denom,
                     [&](const DenseVector& xi, std::size_t j) { log_row(xi, e + 1, j, kNaN, false); });
      result.x = std::move(x);
      break;
    }
    case Algorithm::os_nes05:
    case Algorithm::os_rnes05: {
      const double gamma = options.algorithm == Algorithm::os_rnes05 ? options.gamma : 0.0;
      const DenseVector denom = sqs_denominator(l_diag, problem.reg, problem.grid);
      MomentumState st = init_momentum(x0);
      for (std::size_t e = 0; e < epochs; ++e)
        os_rnes05_epoch(st, gamma, grads, order, problem.reg, problem.grid, problem.box, denom,
                        [&](const DenseVector& xi, std::size_t j) { log_row(xi, e + 1, j, kNaN, false); });
      result.x = std::move(st.x);
      break;
    }
    case Algorithm::fista: {
      // One FISTA iteration per epoch.
      std::size_t e = 0;
      const FistaResult res = fista_reference(problem, x0, options.max_epochs, 0.0, true,
                                              [&](const DenseVector& xi, std::size_t) {
                                                log_row(xi, ++e, 1, kNaN, false);
                                              });
      result.x = res.x;
      break;
    }
  }
  return result;
}

}  // namespace oslalm
