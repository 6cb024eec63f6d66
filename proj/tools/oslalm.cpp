// Command-line front end: simulate, reconstruct, compare, analyze.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <optional>

#include "oslalm/harness.hpp"
#include "oslalm/image_io.hpp"

namespace fs = std::filesystem;
using namespace oslalm;

namespace {

struct Common {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string out_dir;

  ExperimentConfig load() const {
    std::vector<std::string> ov = overrides;
    if (!out_dir.empty()) ov.push_back("output_dir=\"" + out_dir + "\"");
    std::optional<fs::path> file;
    if (!config_file.empty()) file = config_file;
    return parse_config(load_config_json(file, ov));
  }
};

struct ReconFlags {
  std::optional<std::string> algorithm;
  std::optional<std::size_t> subsets;
  std::optional<double> rho;
  bool continuation = false;
  std::optional<double> rho_min;
  std::optional<int> n_inner;
  std::optional<int> epochs;
  std::optional<std::string> majorizer;
  bool bb = false;
  std::optional<double> gamma;
  bool all = false;
  std::vector<double> pgm_window;
};

std::vector<std::string> recon_overrides(const ReconFlags& f) {
  std::vector<std::string> ov;
  if (f.algorithm) ov.push_back("solver.algorithm=\"" + *f.algorithm + "\"");
  if (f.subsets) ov.push_back(fmt::format("solver.subsets={}", *f.subsets));
  if (f.rho) ov.push_back(fmt::format("solver.rho={}", *f.rho));
  if (f.continuation) ov.push_back("solver.continuation=true");
  if (f.rho_min) ov.push_back(fmt::format("solver.rho_min={}", *f.rho_min));
  if (f.n_inner) ov.push_back(fmt::format("solver.n_inner={}", *f.n_inner));
  if (f.epochs) ov.push_back(fmt::format("solver.epochs={}", *f.epochs));
  if (f.majorizer) ov.push_back("solver.majorizer=\"" + *f.majorizer + "\"");
  if (f.bb) ov.push_back("solver.bb=true");
  if (f.gamma) ov.push_back(fmt::format("solver.gamma={}", *f.gamma));
  return ov;
}

void print_paths(const std::vector<fs::path>& paths) {
  for (const auto& p : paths) std::printf("%s\n", p.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OS-LALM reconstruction toolkit"};
  app.require_subcommand(1);

  Common common;
  app.add_option("-c,--config", common.config_file, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--set", common.overrides, "Override a config key, e.g. --set solver.subsets=8");
  app.add_option("-o,--out", common.out_dir, "Output directory (overrides output_dir)");

  auto* sim = app.add_subcommand("simulate", "Write phantom, sinogram, weights and geometry sidecar");

  ReconFlags rf;
  auto* rec = app.add_subcommand("reconstruct", "Run a solver on the simulated data");
  rec->add_option("-a,--algorithm", rf.algorithm, "os-lalm, ista, os-sqs, os-nes05, os-rnes05, fista");
  rec->add_option("--M,--subsets", rf.subsets, "Number of ordered subsets");
  rec->add_option("--rho", rf.rho, "Fixed AL penalty parameter in (0, 1]");
  rec->add_flag("--continuation", rf.continuation, "Decreasing rho schedule with adaptive restart");
  rec->add_option("--rho-min", rf.rho_min, "Lower bound of the continuation schedule");
  rec->add_option("--n", rf.n_inner, "Inner FISTA iterations per prox");
  rec->add_option("--epochs", rf.epochs, "Passes over the data");
  rec->add_option("--majorizer", rf.majorizer, "scalar, diagonal or bb-diagonal");
  rec->add_flag("--bb", rf.bb, "Barzilai-Borwein rescaling of the diagonal majorizer");
  rec->add_option("--gamma", rf.gamma, "Relaxation of os-rnes05");
  rec->add_flag("--all", rf.all, "Run every entry of the config's runs list");
  rec->add_option("--pgm", rf.pgm_window, "Also export a 16-bit PGM with display window LO HI")->expected(2);

  std::vector<std::string> compare_runs;
  bool svg = false;
  auto* cmp = app.add_subcommand("compare", "Merge rmsd-vs-epoch curves of finished runs");
  cmp->add_option("runs", compare_runs, "Run names, e.g. OS-LALM-8-c-1 OS-SQS-8")->required();
  cmp->add_flag("--svg", svg, "Also render compare.svg");

  auto* ana = app.add_subcommand("analyze", "Theory checks");
  ana->require_subcommand(1);
  double lambda_ratio = 0.5, damp_rho = 1.0;
  auto* damp = ana->add_subcommand("damping", "Regime and rate of one eigencomponent");
  damp->add_option("--lambda-ratio", lambda_ratio, "lambda/L in (0, 1]")->required();
  damp->add_option("--rho", damp_rho, "AL penalty parameter")->required();

  std::size_t gap_n = 16, gap_iters = 200;
  double gap_rho = 1.0;
  std::uint64_t gap_seed = 7;
  auto* gap = ana->add_subcommand("gap", "Primal-dual gap of an exact-update run against its bound");
  gap->add_option("--n", gap_n, "Image side length");
  gap->add_option("--iters", gap_iters, "Iterations");
  gap->add_option("--rho", gap_rho, "AL penalty parameter");
  gap->add_option("--seed", gap_seed, "Problem seed");

  std::string restart_log;
  std::optional<double> mu, lip, mu_ratio;
  std::size_t restart_updates = 600;
  auto* rst = ana->add_subcommand("restart", "Mean interval between continuation restarts");
  rst->add_option("--log", restart_log, "Convergence log of a continuation run");
  rst->add_option("--mu", mu, "Smallest eigenvalue of the data Hessian");
  rst->add_option("--L", lip, "Majorizer constant");
  rst->add_option("--mu-ratio", mu_ratio, "Run the built-in diagonal quadratic with this mu/L instead");
  rst->add_option("--updates", restart_updates, "Updates for the built-in experiment");

  std::size_t samples = 1000;
  auto* maj = ana->add_subcommand("majorization", "Sampled majorization check of scalar L and L_diag");
  maj->add_option("--samples", samples, "Random pairs per majorizer");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (sim->parsed()) {
      print_paths(cmd_simulate(common.load()));
    } else if (rec->parsed()) {
      Common c = common;
      for (auto& ov : recon_overrides(rf)) c.overrides.push_back(ov);
      const ExperimentConfig cfg = c.load();
      std::vector<SolverOptions> jobs = rf.all ? cfg.runs : std::vector<SolverOptions>{cfg.solver};
      if (jobs.empty()) throw Error(ErrorCategory::config, "--all given but the config has no runs");
      for (const SolverOptions& o : jobs) {
        const ReconstructOutputs r = cmd_reconstruct(cfg, o);
        print_paths(r.files);
        if (!rf.pgm_window.empty()) {
          const fs::path pgm = cfg.output_dir / (r.name + ".pgm");
          export_pgm16(pgm, read_raw_f32(r.files[0], cfg.grid.size()), cfg.grid, rf.pgm_window[0],
                       rf.pgm_window[1]);
          print_paths({pgm});
        }
      }
    } else if (cmp->parsed()) {
      print_paths({cmd_compare(common.load(), compare_runs, svg)});
      if (svg) print_paths({common.load().output_dir / "compare.svg"});
    } else if (damp->parsed()) {
      print_paths({analyze_damping(common.load().output_dir, lambda_ratio, damp_rho)});
    } else if (gap->parsed()) {
      print_paths({analyze_gap(common.load().output_dir, gap_n, gap_iters, gap_rho, gap_seed)});
    } else if (rst->parsed()) {
      const ExperimentConfig cfg = common.load();
      if (mu_ratio) {
        const ConvergenceLog log = restart_experiment(*mu_ratio, 200, restart_updates);
        fs::create_directories(cfg.output_dir);
        log.write_csv(cfg.output_dir / "restart_log.csv");
        print_paths({analyze_restart(cfg.output_dir, log, *mu_ratio, 1.0)});
      } else {
        if (restart_log.empty() || !mu || !lip)
          throw Error(ErrorCategory::config, "restart needs --log with --mu and --L, or --mu-ratio");
        print_paths({analyze_restart(cfg.output_dir, ConvergenceLog::read_csv(restart_log), *mu, *lip)});
      }
    } else if (maj->parsed()) {
      print_paths({analyze_majorization(common.load(), samples)});
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error[%s]: %s\n", std::string(to_string(e.category())).c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error[internal]: %s\n", e.what());
    return 3;
  }
  return 0;
}
