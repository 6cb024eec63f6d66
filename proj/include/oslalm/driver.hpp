#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "oslalm/baselines.hpp"
#include "oslalm/problem.hpp"
#include "oslalm/solvers.hpp"

namespace oslalm {

enum class Algorithm { os_lalm, ista, os_sqs, os_nes05, os_rnes05, fista };

std::string to_string(Algorithm a);
/// Accepts the names printed by to_string ("os-lalm", "os-sqs", ...).
Algorithm parse_algorithm(const std::string& name);

struct SolverOptions {
  Algorithm algorithm = Algorithm::os_lalm;
  RhoMode mode = RhoMode::fixed;
  double rho_fixed = 1.0;
  double rho_min = kDefaultRhoMin;
  std::size_t subsets = 1;
  int n_inner = 1;
  int max_epochs = 10;
  MajorizerKind majorizer = MajorizerKind::diagonal;
  bool bb = false;
  double gamma = 0.0;  // relaxation of OS-rNes05
  std::uint64_t seed = 0;

  void validate() const;
};

/// Run label: OS-LALM-<M>-<rho>-<n>, OS-LALM-<M>-c-<n> ("-bb" appended with BB
/// scaling), OS-SQS-<M>,
/// OS-Nes05-<M>, OS-rNes05-<M>-<gamma>, ISTA, FISTA.
std::string run_name(const SolverOptions& options);

struct LogRow {
  std::size_t epoch = 0;
  std::size_t inner = 0;
  double rho = 0.0;  // NaN when the algorithm has no AL parameter
  bool restarted = false;
  double objective = 0.0;
  double rmsd = 0.0;  // NaN without a reference image
  double seconds = 0.0;
};

/// One row per inner update plus the initial row (epoch 0, inner 0).
struct ConvergenceLog {
  std::vector<LogRow> rows;

  static constexpr const char* kHeader = "epoch,inner,rho,restarted,objective,rmsd,seconds";

  std::string to_csv() const;
  static ConvergenceLog from_csv(const std::string& text);
  void write_csv(const std::filesystem::path& path) const;
  static ConvergenceLog read_csv(const std::filesystem::path& path);

  /// rmsd of the last row of every epoch, epoch 0 first.
  std::vector<double> rmsd_per_epoch() const;
  std::size_t restart_count() const;
};

struct RunResult {
  DenseVector x;
  ConvergenceLog log;
};

/// Runs the selected algorithm for max_epochs passes over the data, logging
/// every inner update. reference may be null, in which case rmsd is NaN.
RunResult run_reconstruction(const PwlsProblem& problem, const Geometry& geo,
                             const SolverOptions& options, const DenseVector& x0,
                             const DenseVector* reference);

}  // namespace oslalm
