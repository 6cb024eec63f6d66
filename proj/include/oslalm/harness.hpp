#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oslalm/analysis.hpp"
#include "oslalm/ct_model.hpp"
#include "oslalm/driver.hpp"
#include "oslalm/problem.hpp"

namespace oslalm {

/// Everything an experiment needs. Loaded from a JSON document whose keys
/// mirror these fields (see default_config_json for the full layout).
struct ExperimentConfig {
  ImageGrid grid;
  Geometry geometry;
  std::vector<Ellipse> phantom;
  double i0 = 1e4;
  std::uint64_t seed = 1;
  bool noiseless = false;
  RegularizerConfig reg;
  BoxConstraint box;
  int reference_iters = 4000;
  double reference_tol = 1e-13;
  SolverOptions solver;
  std::vector<SolverOptions> runs;  // used by reconstruct --all
  std::filesystem::path output_dir = "out";
};

/// Defaults for every key.
nlohmann::json default_config_json();

/// Defaults, deep-merged with the file (when given), then with "a.b.c=value"
/// overrides. Override values are parsed as JSON when possible, otherwise
/// taken as strings.
nlohmann::json load_config_json(const std::optional<std::filesystem::path>& file,
                                const std::vector<std::string>& overrides);

ExperimentConfig parse_config(const nlohmann::json& j);
SolverOptions parse_solver_options(const nlohmann::json& j);

/// Simulated data as it lives on disk.
struct SimulatedData {
  ImageGrid grid;
  Geometry geometry;
  DenseVector phantom;
  DenseVector sinogram;
  DenseVector weights;
};

inline constexpr const char* kPhantomFile = "phantom.raw";
inline constexpr const char* kSinogramFile = "sinogram.raw";
inline constexpr const char* kWeightsFile = "weights.raw";
inline constexpr const char* kGeometryFile = "geometry.hdr";
inline constexpr const char* kReferenceFile = "reference.raw";

/// Simulates the scan described by the config. Values are rounded to float32,
/// exactly as they will be stored.
SimulatedData simulate(const ExperimentConfig& cfg);

/// Writes the four simulation files into cfg.output_dir and returns their paths.
std::vector<std::filesystem::path> cmd_simulate(const ExperimentConfig& cfg);

SimulatedData load_simulation(const std::filesystem::path& dir);

PwlsProblem make_problem(const SimulatedData& data, const ExperimentConfig& cfg);

/// FNV-1a over the float32 bytes of an image; identifies reference images.
std::string image_fingerprint(const DenseVector& image);

/// Loads reference.raw from the output directory, or computes it with FISTA
/// and stores it.
DenseVector ensure_reference(const PwlsProblem& problem, const ExperimentConfig& cfg);

struct ReconstructOutputs {
  std::string name;
  std::vector<std::filesystem::path> files;  // image, sidecar, log, meta
  ConvergenceLog log;
};

ReconstructOutputs cmd_reconstruct(const ExperimentConfig& cfg, const SolverOptions& options);

/// Merges rmsd-per-epoch of the named runs into compare.csv (and compare.svg
/// when svg is set). Throws io naming the first missing log and data when the
/// runs were measured against different references.
std::filesystem::path cmd_compare(const ExperimentConfig& cfg, const std::vector<std::string>& runs,
                                  bool svg);

std::filesystem::path analyze_damping(const std::filesystem::path& dir, double lambda_ratio,
                                      double rho);

struct GapSweepRow {
  std::size_t k = 0;
  double gap = 0.0;
  double bound = 0.0;
};

/// Exact-update LALM on a seeded strongly convex quadratic with n x n pixels:
/// h = c/2 |x|^2, W = I, scalar L. Gap of averaged iterates and C^2/k for k = 1..iters.
std::vector<GapSweepRow> gap_sweep(std::size_t n, std::size_t iters, double rho, std::uint64_t seed);
std::filesystem::path analyze_gap(const std::filesystem::path& dir, std::size_t n, std::size_t iters,
                                  double rho, std::uint64_t seed);

/// Continuation OS-LALM (M = 1, h = 0) on a diagonal quadratic whose
/// eigenvalues are spread evenly over [mu_ratio, 1] with L = 1.
ConvergenceLog restart_experiment(double mu_ratio, std::size_t dim, std::size_t updates);
std::filesystem::path analyze_restart(const std::filesystem::path& dir, const ConvergenceLog& log,
                                      double mu, double lipschitz);

std::filesystem::path analyze_majorization(const ExperimentConfig& cfg, std::size_t samples);

}  // namespace oslalm
