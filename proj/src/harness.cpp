#include "oslalm/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "oslalm/image_io.hpp"
#include "oslalm/majorizer.hpp"

namespace oslalm {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void deep_merge(json& base, const json& patch) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object())
      deep_merge(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

template <typename T>
T get_or_throw(const json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw Error(ErrorCategory::config, fmt::format("{}: missing key '{}'", where, key));
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCategory::config, fmt::format("{}: key '{}' has the wrong type", where, key));
  }
}

MajorizerKind parse_majorizer(const std::string& s) {
  if (s == "scalar") return MajorizerKind::scalar;
  if (s == "diagonal") return MajorizerKind::diagonal;
  if (s == "bb-diagonal") return MajorizerKind::bb_scaled_diagonal;
  throw Error(ErrorCategory::config, "unknown majorizer '" + s + "'");
}

std::string majorizer_name(MajorizerKind k) {
  switch (k) {
    case MajorizerKind::scalar: return "scalar";
    case MajorizerKind::diagonal: return "diagonal";
    case MajorizerKind::bb_scaled_diagonal: return "bb-diagonal";
  }
  return "unknown";
}

json options_to_json(const SolverOptions& o) {
  return {{"algorithm", to_string(o.algorithm)},
          {"subsets", o.subsets},
          {"rho", o.rho_fixed},
          {"continuation", o.mode == RhoMode::continuation},
          {"rho_min", o.rho_min},
          {"n_inner", o.n_inner},
          {"epochs", o.max_epochs},
          {"majorizer", majorizer_name(o.majorizer)},
          {"bb", o.bb},
          {"gamma", o.gamma},
          {"seed", o.seed}};
}

DenseVector round_to_f32(const DenseVector& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i]);
  return DenseVector(std::move(out));
}

Sidecar geometry_sidecar(const ExperimentConfig& cfg) {
  Sidecar s = image_sidecar(cfg.grid);
  s["n_views"] = std::to_string(cfg.geometry.n_views);
  s["n_bins"] = std::to_string(cfg.geometry.n_bins);
  s["bin_spacing"] = fmt::format("{}", cfg.geometry.bin_spacing);
  s["i0"] = fmt::format("{}", cfg.i0);
  s["seed"] = std::to_string(cfg.seed);
  s["noiseless"] = cfg.noiseless ? "1" : "0";
  return s;
}

std::string reference_key(const SimulatedData& data, const ExperimentConfig& cfg) {
  return fmt::format("{}|{}|{}|{}|{}|{}|{}|{}", image_fingerprint(data.sinogram),
                     image_fingerprint(data.weights), cfg.reg.beta, cfg.reg.potential.delta,
                     cfg.reg.potential.kind == PotentialKind::fair ? "fair" : "quadratic", cfg.box.lo,
                     cfg.box.hi, cfg.reference_iters);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCategory::io, "write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCategory::io, "cannot create " + dir.string() + ": " + ec.message());
}

std::string render_svg(const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& curves) {
  const double w = 640, h = 400, pad = 50;
  std::size_t max_len = 1;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& c : curves) {
    max_len = std::max(max_len, c.size());
    for (double v : c)
      if (std::isfinite(v) && v > 0) {
        lo = std::min(lo, std::log10(v));
        hi = std::max(hi, std::log10(v));
      }
  }
  if (!std::isfinite(lo)) lo = -1, hi = 0;
  if (hi - lo < 1e-9) hi = lo + 1;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{}\" y=\"{}\" font-size=\"12\">epoch</text>\n"
      "<text x=\"5\" y=\"20\" font-size=\"12\">log10 rmsd [{:.2f}, {:.2f}]</text>\n",
      w, h, w / 2, h - 10, lo, hi);
  for (std::size_t c = 0; c < curves.size(); ++c) {
    std::string pts;
    for (std::size_t k = 0; k < curves[c].size(); ++k) {
      const double v = curves[c][k];
      if (!(std::isfinite(v) && v > 0)) continue;
      const double px = pad + (w - 2 * pad) * static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(max_len - 1, 1));
      const double py = h - pad - (h - 2 * pad) * (std::log10(v) - lo) / (hi - lo);
      pts += fmt::format("{:.1f},{:.1f} ", px, py);
    }
    const char* col = colors[c % 7];
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" points=\"{}\"/>\n", col, pts);
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{}\">{}</text>\n", w - 170,
                       30 + 15 * c, col, names[c]);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace

json default_config_json() {
  return json::parse(R"({
    "grid": {"n": 64, "pixel_size": 1.0, "roi_radius": null},
    "geometry": {"n_views": 96, "n_bins": 96, "bin_spacing": 1.0},
    "phantom": "default",
    "noise": {"i0": 10000.0, "seed": 1, "noiseless": false},
    "regularizer": {"beta": 10000.0, "potential": "fair", "delta": 0.002},
    "box": {"lo": 0.0, "hi": null},
    "reference": {"iters": 4000, "tol": 1e-13},
    "solver": {"algorithm": "os-lalm", "subsets": 8, "rho": 1.0, "continuation": false,
               "rho_min": 0.001, "n_inner": 1, "epochs": 30, "majorizer": "diagonal",
               "bb": false, "gamma": 0.0, "seed": 0},
    "runs": [],
    "output_dir": "out"
  })");
}

json load_config_json(const std::optional<fs::path>& file, const std::vector<std::string>& overrides) {
  json cfg = default_config_json();
  if (file) {
    std::ifstream in(*file);
    if (!in) throw Error(ErrorCategory::io, "cannot read " + file->string());
    json patch;
    try {
      patch = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCategory::config, file->string() + ": " + e.what());
    }
    if (!patch.is_object()) throw Error(ErrorCategory::config, file->string() + ": top level must be an object");
    deep_merge(cfg, patch);
  }
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorCategory::config, "override '" + ov + "' is not key.path=value");
    const std::string path = ov.substr(0, eq);
    const std::string raw = ov.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;
    }
    json* node = &cfg;
    std::size_t start = 0;
    while (true) {
      const auto dot = path.find('.', start);
      const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (key.empty()) throw Error(ErrorCategory::config, "override '" + ov + "' has an empty key");
      if (dot == std::string::npos) {
        (*node)[key] = value;
        break;
      }
      if (!(*node)[key].is_object()) (*node)[key] = json::object();
      node = &(*node)[key];
      start = dot + 1;
    }
  }
  return cfg;
}

SolverOptions parse_solver_options(const json& j) {
  const char* where = "solver";
  SolverOptions o;
  o.algorithm = parse_algorithm(get_or_throw<std::string>(j, "algorithm", where));
  o.subsets = get_or_throw<std::size_t>(j, "subsets", where);
  o.rho_fixed = get_or_throw<double>(j, "rho", where);
  o.mode = get_or_throw<bool>(j, "continuation", where) ? RhoMode::continuation : RhoMode::fixed;
  o.rho_min = get_or_throw<double>(j, "rho_min", where);
  o.n_inner = get_or_throw<int>(j, "n_inner", where);
  o.max_epochs = get_or_throw<int>(j, "epochs", where);
  o.majorizer = parse_majorizer(get_or_throw<std::string>(j, "majorizer", where));
  o.bb = get_or_throw<bool>(j, "bb", where);
  o.gamma = get_or_throw<double>(j, "gamma", where);
  o.seed = get_or_throw<std::uint64_t>(j, "seed", where);
  o.validate();
  return o;
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  const json& g = j.at("grid");
  c.grid = ImageGrid::square(get_or_throw<std::size_t>(g, "n", "grid"), get_or_throw<double>(g, "pixel_size", "grid"));
  if (g.contains("roi_radius") && !g.at("roi_radius").is_null())
    c.grid.roi_radius = get_or_throw<double>(g, "roi_radius", "grid");
  c.grid.validate();

  const json& geo = j.at("geometry");
  c.geometry = Geometry::parallel(get_or_throw<std::size_t>(geo, "n_views", "geometry"),
                                  get_or_throw<std::size_t>(geo, "n_bins", "geometry"),
                                  get_or_throw<double>(geo, "bin_spacing", "geometry"));
  c.geometry.validate();

  const json& ph = j.at("phantom");
  if (ph.is_string()) {
    if (ph.get<std::string>() != "default")
      throw Error(ErrorCategory::config, "phantom must be \"default\" or a list of ellipses");
    c.phantom = default_phantom(c.grid);
  } else if (ph.is_array()) {
    for (const json& e : ph)
      c.phantom.push_back({get_or_throw<double>(e, "cx", "phantom"), get_or_throw<double>(e, "cy", "phantom"),
                           get_or_throw<double>(e, "rx", "phantom"), get_or_throw<double>(e, "ry", "phantom"),
                           e.value("angle", 0.0), get_or_throw<double>(e, "density", "phantom")});
  } else {
    throw Error(ErrorCategory::config, "phantom must be \"default\" or a list of ellipses");
  }

  const json& n = j.at("noise");
  c.i0 = get_or_throw<double>(n, "i0", "noise");
  if (!(c.i0 > 0.0)) throw Error(ErrorCategory::config, "noise.i0 must be positive");
  c.seed = get_or_throw<std::uint64_t>(n, "seed", "noise");
  c.noiseless = n.value("noiseless", false);

  const json& r = j.at("regularizer");
  c.reg.beta = get_or_throw<double>(r, "beta", "regularizer");
  const auto pot = get_or_throw<std::string>(r, "potential", "regularizer");
  if (pot == "fair")
    c.reg.potential = {PotentialKind::fair, get_or_throw<double>(r, "delta", "regularizer")};
  else if (pot == "quadratic")
    c.reg.potential = {PotentialKind::quadratic, 1.0};
  else
    throw Error(ErrorCategory::config, "unknown potential '" + pot + "'");
  c.reg.validate();

  const json& b = j.at("box");
  c.box.lo = b.at("lo").is_null() ? -std::numeric_limits<double>::infinity() : b.at("lo").get<double>();
  c.box.hi = b.at("hi").is_null() ? std::numeric_limits<double>::infinity() : b.at("hi").get<double>();
  c.box.validate();

  c.reference_iters = get_or_throw<int>(j.at("reference"), "iters", "reference");
  c.reference_tol = get_or_throw<double>(j.at("reference"), "tol", "reference");

  c.solver = parse_solver_options(j.at("solver"));
  for (const json& run : j.at("runs")) {
    json merged = j.at("solver");
    deep_merge(merged, run);
    c.runs.push_back(parse_solver_options(merged));
  }
  c.output_dir = get_or_throw<std::string>(j, "output_dir", "config");
  return c;
}

SimulatedData simulate(const ExperimentConfig& cfg) {
  SimulatedData d;
  d.grid = cfg.grid;
  d.geometry = cfg.geometry;
  d.phantom = round_to_f32(make_phantom(cfg.grid, cfg.phantom));
  const SparseMatrix a = build_system_matrix(cfg.grid, cfg.geometry);
  const MeasuredData m = synthesize_weights(a, d.phantom, cfg.i0, cfg.seed, cfg.noiseless);
  d.sinogram = round_to_f32(m.y);
  d.weights = round_to_f32(m.weights.diag());
  return d;
}

std::vector<fs::path> cmd_simulate(const ExperimentConfig& cfg) {
  const SimulatedData d = simulate(cfg);
  ensure_dir(cfg.output_dir);
  const std::vector<fs::path> files = {cfg.output_dir / kPhantomFile, cfg.output_dir / kSinogramFile,
                                       cfg.output_dir / kWeightsFile, cfg.output_dir / kGeometryFile};
  write_raw_f32(files[0], d.phantom);
  write_raw_f32(files[1], d.sinogram);
  write_raw_f32(files[2], d.weights);
  write_sidecar(files[3], geometry_sidecar(cfg));
  return files;
}

SimulatedData load_simulation(const fs::path& dir) {
  const fs::path hdr = dir / kGeometryFile;
  if (!fs::exists(hdr)) throw Error(ErrorCategory::io, "missing simulated data: " + hdr.string());
  const Sidecar s = read_sidecar(hdr);
  SimulatedData d;
  d.grid = grid_from_sidecar(s, hdr.string());
  d.geometry = Geometry::parallel(static_cast<std::size_t>(sidecar_number(s, "n_views", hdr.string())),
                                  static_cast<std::size_t>(sidecar_number(s, "n_bins", hdr.string())),
                                  sidecar_number(s, "bin_spacing", hdr.string()));
  d.geometry.validate();
  d.phantom = read_raw_f32(dir / kPhantomFile, d.grid.size());
  d.sinogram = read_raw_f32(dir / kSinogramFile, d.geometry.n_rays());
  d.weights = read_raw_f32(dir / kWeightsFile, d.geometry.n_rays());
  return d;
}

PwlsProblem make_problem(const SimulatedData& data, const ExperimentConfig& cfg) {
  PwlsProblem p{build_system_matrix(data.grid, data.geometry), DiagonalOperator(data.weights),
                data.sinogram, data.grid, cfg.reg, cfg.box};
  p.validate();
  return p;
}

std::string image_fingerprint(const DenseVector& image) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (double v : image) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int b = 0; b < 4; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  }
  return fmt::format("{:016x}", h);
}

DenseVector ensure_reference(const PwlsProblem& problem, const ExperimentConfig& cfg) {
  const fs::path raw = cfg.output_dir / kReferenceFile;
  const fs::path hdr = cfg.output_dir / "reference.hdr";
  SimulatedData key_data{problem.grid, cfg.geometry, {}, problem.y, problem.weights.diag()};
  const std::string key = reference_key(key_data, cfg);
  if (fs::exists(raw) && fs::exists(hdr)) {
    const Sidecar s = read_sidecar(hdr);
    const auto it = s.find("key");
    if (it != s.end() && it->second == key) return read_raw_f32(raw, problem.n_pixels());
  }
  const FistaResult res = fista_reference(problem, DenseVector(problem.n_pixels()), cfg.reference_iters,
                                          cfg.reference_tol, true);
  const DenseVector ref = round_to_f32(res.x);
  ensure_dir(cfg.output_dir);
  write_raw_f32(raw, ref);
  Sidecar s = image_sidecar(problem.grid);
  s["key"] = key;
  s["iterations"] = std::to_string(res.iterations);
  s["restarts"] = std::to_string(res.restarts);
  s["fingerprint"] = image_fingerprint(ref);
  write_sidecar(hdr, s);
  return ref;
}

ReconstructOutputs cmd_reconstruct(const ExperimentConfig& cfg, const SolverOptions& options) {
  options.validate();
  const SimulatedData data = load_simulation(cfg.output_dir);
  const PwlsProblem problem = make_problem(data, cfg);
  const DenseVector reference = ensure_reference(problem, cfg);
  const DenseVector x0(problem.n_pixels());
  RunResult run = run_reconstruction(problem, data.geometry, options, x0, &reference);

  ReconstructOutputs out;
  out.name = run_name(options);
  const fs::path base = cfg.output_dir / out.name;
  out.files = {fs::path(base.string() + ".raw"), fs::path(base.string() + ".hdr"),
               fs::path(base.string() + ".csv"), fs::path(base.string() + ".meta.json")};
  write_raw_f32(out.files[0], run.x);
  write_sidecar(out.files[1], image_sidecar(problem.grid));
  run.log.write_csv(out.files[2]);
  const json meta = {{"name", out.name},
                     {"options", options_to_json(options)},
                     {"reference_fingerprint", image_fingerprint(reference)},
                     {"final_rmsd", run.log.rows.back().rmsd}};
  write_text(out.files[3], meta.dump(2) + "\n");
  out.log = std::move(run.log);
  return out;
}

fs::path cmd_compare(const ExperimentConfig& cfg, const std::vector<std::string>& runs, bool svg) {
  if (runs.empty()) throw Error(ErrorCategory::config, "compare: no runs given");
  std::vector<std::vector<double>> curves;
  std::optional<std::string> fingerprint;
  std::string fingerprint_owner;
  for (const std::string& name : runs) {
    const fs::path csv = cfg.output_dir / (name + ".csv");
    if (!fs::exists(csv)) throw Error(ErrorCategory::io, "missing log file: " + csv.string());
    curves.push_back(ConvergenceLog::read_csv(csv).rmsd_per_epoch());
    const fs::path meta_path = cfg.output_dir / (name + ".meta.json");
    if (!fs::exists(meta_path)) throw Error(ErrorCategory::io, "missing metadata file: " + meta_path.string());
    std::ifstream in(meta_path);
    json meta;
    try {
      meta = json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCategory::data, meta_path.string() + ": " + e.what());
    }
    const std::string fp = meta.value("reference_fingerprint", "");
    if (!fingerprint) {
      fingerprint = fp;
      fingerprint_owner = name;
    } else if (*fingerprint != fp) {
      throw Error(ErrorCategory::data,
                  fmt::format("mismatched references: {} and {} were measured against different images",
                              fingerprint_owner, name));
    }
  }

  std::size_t len = 0;
  for (const auto& c : curves) len = std::max(len, c.size());
  std::string text = "epoch";
  for (const std::string& name : runs) text += "," + name;
  text += "\n";
  for (std::size_t k = 0; k < len; ++k) {
    text += std::to_string(k);
    for (const auto& c : curves) text += "," + (k < c.size() ? fmt::format("{}", c[k]) : std::string("nan"));
    text += "\n";
  }
  const fs::path out = cfg.output_dir / "compare.csv";
  write_text(out, text);
  if (svg) write_text(cfg.output_dir / "compare.svg", render_svg(runs, curves));
  return out;
}

fs::path analyze_damping(const fs::path& dir, double lambda_ratio, double rho) {
  const DampingReport rep = classify_damping(lambda_ratio, rho);
  ensure_dir(dir);
  const fs::path out = dir / "damping.csv";
  write_text(out, fmt::format("lambda_ratio,rho,rho_critical,regime,rate,damped_frequency\n{},{},{},{},{},{}\n",
                              rep.lambda_ratio, rep.rho, rep.rho_critical, to_string(rep.regime), rep.rate,
                              rep.damped_frequency ? fmt::format("{}", *rep.damped_frequency) : "nan"));
  return out;
}

std::vector<GapSweepRow> gap_sweep(std::size_t n, std::size_t iters, double rho, std::uint64_t seed) {
  if (n < 1 || iters < 1) throw Error(ErrorCategory::domain, "gap_sweep: n and iters must be >= 1");
  const std::size_t np = n * n;
  const std::size_t rows = 4 * np;
  const double c = 0.1;  // strong convexity of h

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> dense(rows * np);
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
  for (double& v : dense) v = normal(rng) * scale;
  const SparseMatrix a = SparseMatrix::from_dense(rows, np, dense);
  const DiagonalOperator w = DiagonalOperator::identity(rows);
  DenseVector y(rows);
  for (double& v : y) v = normal(rng);
  const QuadraticPenalty h(c);
  const double lipschitz = spectral_bound(a, w);

  // Minimizer of 1/2 |Ax - y|^2 + c/2 |x|^2: conjugate gradients on the normal
  // equations, run to round-off.
  auto normal_op = [&](const DenseVector& v) {
    DenseVector out = spmv_t(a, spmv(a, v));
    out.axpy(c, v);
    return out;
  };
  DenseVector x_hat(np);
  DenseVector r = spmv_t(a, y), p = r;
  double rr = dot(r, r);
  const double stop = 1e-30 * rr;
  for (std::size_t k = 0; k < 10 * np && rr > stop; ++k) {
    const DenseVector q = normal_op(p);
    const double step = rr / dot(p, q);
    x_hat.axpy(step, p);
    r.axpy(-step, q);
    const double rr_next = dot(r, r);
    p *= rr_next / rr;
    p += r;
    rr = rr_next;
  }

  const Majorizer maj = Majorizer::scalar(lipschitz, np);
  FullLalmState st = init_full_lalm(DenseVector(np), a, w, y, rho);
  const GapContext ctx = make_gap_context(x_hat, st, a, w, y, rho, lipschitz);
  const std::vector<double> eps(iters, 0.0);

  DenseVector x_sum(np), z_sum(rows);
  std::vector<GapSweepRow> out;
  for (std::size_t k = 1; k <= iters; ++k) {
    st = full_lalm_step(st, a, w, y, h, maj, rho);
    x_sum += st.x;
    z_sum.axpy(-rho, st.d);
    DenseVector x_avg = x_sum, z_avg = z_sum;
    x_avg *= 1.0 / static_cast<double>(k);
    z_avg *= 1.0 / static_cast<double>(k);
    out.push_back({k, primal_dual_gap(z_avg, x_avg, ctx, a, w, y, h), gap_bound(k, ctx, eps).bound});
  }
  return out;
}

fs::path analyze_gap(const fs::path& dir, std::size_t n, std::size_t iters, double rho, std::uint64_t seed) {
  const auto rows = gap_sweep(n, iters, rho, seed);
  std::string text = "k,gap,bound,within\n";
  for (const auto& r : rows) text += fmt::format("{},{},{},{}\n", r.k, r.gap, r.bound, r.gap <= r.bound ? 1 : 0);
  ensure_dir(dir);
  const fs::path out = dir / "gap.csv";
  write_text(out, text);
  return out;
}

ConvergenceLog restart_experiment(double mu_ratio, std::size_t dim, std::size_t updates) {
  if (!(mu_ratio > 0.0 && mu_ratio <= 1.0)) throw Error(ErrorCategory::domain, "restart_experiment: mu ratio must lie in (0, 1]");
  if (dim < 2) throw Error(ErrorCategory::domain, "restart_experiment: dim must be >= 2");
  std::vector<SparseMatrix::Triplet> trip;
  DenseVector y(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double lambda = mu_ratio + (1.0 - mu_ratio) * static_cast<double>(i) / static_cast<double>(dim - 1);
    trip.push_back({i, i, std::sqrt(lambda)});
    y[i] = 1.0;
  }
  const SparseMatrix a = SparseMatrix::from_triplets(dim, dim, std::move(trip));
  const GradientFn grad = [&](const DenseVector& x) { return spmv_t(a, spmv(a, x) - y); };
  const QuadraticPenalty h(0.0);
  const Majorizer maj = Majorizer::scalar(1.0, dim);
  RhoSchedule schedule;
  schedule.mode = RhoMode::continuation;
  const std::vector<GradientFn> grads{grad};
  const std::vector<std::size_t> order{0};

  ConvergenceLog log;
  auto obj = [&](const DenseVector& x) { return 0.5 * dot(spmv(a, x) - y, spmv(a, x) - y); };
  const DenseVector x0(dim);
  log.rows.push_back({0, 0, 1.0, false, obj(x0), std::numeric_limits<double>::quiet_NaN(), 0.0});
  SolverState st = init_solver_state(x0, grad(x0));
  for (std::size_t k = 0; k < updates; ++k)
    oslalm_epoch(st, grads, order, h, maj, schedule, [&](const SolverState& s, bool restarted) {
      log.rows.push_back({s.epoch + 1, 1, s.rho, restarted, obj(s.x), std::numeric_limits<double>::quiet_NaN(),
                          static_cast<double>(k + 1)});
    });
  return log;
}

fs::path analyze_restart(const fs::path& dir, const ConvergenceLog& log, double mu, double lipschitz) {
  for (const LogRow& r : log.rows)
    if (std::isnan(r.rho)) throw Error(ErrorCategory::data, "log has no rho column; not an OS-LALM run");
  const RestartPeriodReport rep = restart_period_check(log, mu, lipschitz);
  ensure_dir(dir);
  const fs::path out = dir / "restart.csv";
  write_text(out, fmt::format("restarts,mean_interval,stddev_interval,predicted,relative_deviation,episodes,"
                              "mean_episode_interval\n{},{},{},{},{},{},{}\n",
                              rep.restarts, rep.mean_interval, rep.stddev_interval, rep.predicted,
                              rep.relative_deviation, rep.episodes, rep.mean_episode_interval));
  return out;
}

fs::path analyze_majorization(const ExperimentConfig& cfg, std::size_t samples) {
  const SimulatedData data = simulate(cfg);
  const PwlsProblem p = make_problem(data, cfg);
  const Majorizer scalar = Majorizer::scalar(spectral_bound(p.a, p.weights), p.n_pixels());
  const Majorizer diag = Majorizer::diagonal(compute_Ldiag(p.a, p.weights));
  std::string text = "majorizer,samples,worst_margin,worst_relative_margin,passed\n";
  for (const auto& [name, maj] : {std::pair{"scalar", scalar}, std::pair{"diagonal", diag}}) {
    const MajorizationReport rep = majorization_check(p.a, p.weights, maj, samples, cfg.seed);
    text += fmt::format("{},{},{},{},{}\n", name, rep.samples, rep.worst_margin, rep.worst_relative_margin,
                        rep.passed ? 1 : 0);
  }
  ensure_dir(cfg.output_dir);
  const fs::path out = cfg.output_dir / "majorization.csv";
  write_text(out, text);
  return out;
}

}  // namespace oslalm
