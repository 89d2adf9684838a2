#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "normprop/errors.hpp"
#include "normprop/ingest.hpp"
#include "normprop/moments.hpp"
#include "normprop/montecarlo.hpp"
#include "normprop/report.hpp"
#include "normprop/spectral.hpp"

namespace normprop::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Published fit of the critical exponent against width, reported next to our own fit.
constexpr double kReferenceSlope = -1.6207083;
constexpr double kReferenceIntercept = -3.2559793;

struct Options {
  std::string config_path;
  std::string out_dir = "normprop_out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid_points;
  std::optional<double> grid_max;
  std::optional<std::size_t> layers;
  std::optional<std::string> idx;
  std::optional<unsigned> workers;
  std::string mcrit_scan;
  std::string compensate;
};

template <class T>
std::vector<T> split_list(const std::string& text, const std::string& flag) {
  std::vector<T> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::istringstream parse(item);
    T v{};
    if (!(parse >> v) || !parse.eof()) throw ConfigError(flag + ": cannot parse '" + item + "'");
    values.push_back(v);
  }
  if (values.empty()) throw ConfigError(flag + " needs a comma-separated list");
  return values;
}

json load_document(const Options& options) {
  if (options.config_path.empty()) return default_config();
  std::ifstream in(options.config_path);
  if (!in) throw IoError("cannot open config file " + options.config_path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + options.config_path + " is not valid JSON: " + e.what());
  }
}

RunConfig resolve(const Options& options) {
  json document = load_document(options);
  if (options.seed) document["seed"] = *options.seed;
  if (options.grid_points) document["grid"]["n_points"] = *options.grid_points;
  if (options.grid_max) document["grid"]["z_max"] = *options.grid_max;
  if (options.idx) document["input"] = {{"idx", *options.idx}};
  if (options.workers) document["workers"] = *options.workers;
  if (!options.mcrit_scan.empty()) {
    document["spectrum"]["mcrit_scan"] = split_list<int>(options.mcrit_scan, "--mcrit-scan");
  }
  if (!options.compensate.empty()) {
    document["moments"]["compensate"] = split_list<double>(options.compensate, "--compensate");
  }
  RunConfig config = parse_config(document);
  if (options.layers) {
    if (*options.layers == 0) throw ConfigError("--layers must be >= 1");
    // Extend with the last configured layer, or truncate.
    config.net.layers.resize(*options.layers, config.net.layers.back());
  }
  return config;
}

struct Input {
  std::vector<double> norms;  // empty for a point-mass input
  double mean_sq_norm = 0.0;
  std::optional<IdxImages> images;
};

Input load_input(const RunConfig& config) {
  Input input;
  if (config.input.idx) {
    input.images = load_idx(*config.input.idx);
    if (input.images->count == 0) throw FormatError("IDX file " + config.input.idx->string() + " holds no images");
    input.norms = squared_norms(*input.images, config.input.scale);
    for (double z : input.norms) input.mean_sq_norm += z;
    input.mean_sq_norm /= static_cast<double>(input.norms.size());
  } else {
    input.mean_sq_norm = *config.input.squared_norm;
  }
  return input;
}

Grid make_grid(const RunConfig& config, const Input& input) {
  double z_max = config.grid.z_max.value_or(8.0 * input.mean_sq_norm);
  if (!(z_max > 0.0)) z_max = 1.0;
  return Grid(z_max, config.grid.n_points);
}

MixedDensity initial_density(const Input& input, const Grid& grid) {
  if (!input.norms.empty()) return empirical_density(input.norms, grid);
  if (input.mean_sq_norm > grid.z_max()) {
    throw ConfigError("input squared norm " + std::to_string(input.mean_sq_norm) + " exceeds grid.z_max");
  }
  return discretize(PointMass(input.mean_sq_norm), grid);
}

json grid_json(const Grid& grid) { return {{"z_max", grid.z_max()}, {"n_points", grid.size()}}; }

bool all_relu(const NetworkSpec& net) {
  return std::all_of(net.layers.begin(), net.layers.end(), [](const LayerSpec& l) { return l.activation.is_relu(); });
}

void emit(const fs::path& path, const json& document, std::ostream& out) {
  write_json(path, document);
  out << "wrote " << path.string() << '\n';
}

int cmd_propagate(const RunConfig& config, const fs::path& dir, std::ostream& out) {
  const Input input = load_input(config);
  const Grid grid = make_grid(config, input);
  KernelCache cache({}, config.workers);
  const auto trace = propagate(config.net, initial_density(input, grid), cache);
  write_trace_csv(dir, trace);
  json summary = trace_summary_json(trace);
  summary["grid"] = grid_json(grid);
  summary["distinct_kernels"] = cache.size();
  summary["provenance"] = provenance(to_json(config), config.seed);
  emit(dir / "propagate_summary.json", summary, out);
  return kExitOk;
}

int cmd_spectrum(const RunConfig& config, const fs::path& dir, std::ostream& out) {
  const auto& s = config.spectrum;
  fs::create_directories(dir);
  json series = json::array();
  for (int width : s.widths) {
    const double sigma_w = s.sigma_w.value_or(std::sqrt(2.0 / width));
    const auto report = sweep(width, sigma_w, s.m_min, s.m_max, s.samples);
    const auto csv = dir / ("spectrum_N" + std::to_string(width) + ".csv");
    std::ofstream file(csv);
    if (!file) throw IoError("cannot write " + csv.string());
    write_sweep_csv(file, report);
    json entry = {{"width", width},
                  {"sigma_w", sigma_w},
                  {"csv", csv.filename().string()},
                  {"lambda_at_minus_one", relu_eigenvalue(width, sigma_w, -1.0)},
                  {"m_crit", report.m_crit ? json(*report.m_crit) : json(nullptr)}};
    if (s.discretized_top_k > 0) {
      const Input input = load_input(config);
      LayerSpec layer;
      layer.width = width;
      layer.sigma_w = sigma_w;
      const auto kernel = kernel_matrix(layer, make_grid(config, input), {}, config.workers);
      entry["discretized"] = to_json(discretized_spectrum(kernel, s.discretized_top_k));
    }
    series.push_back(entry);
  }
  json document = {{"series", series}};
  if (!s.mcrit_scan.empty()) {
    std::vector<double> widths, roots;
    for (int width : s.mcrit_scan) {
      widths.push_back(width);
      roots.push_back(m_crit(width, std::sqrt(2.0 / width)));
    }
    json scan = {{"widths", s.mcrit_scan}, {"m_crit", roots}};
    if (widths.size() >= 2) {
      const auto fit = fit_line(widths, roots);
      scan["slope"] = fit.slope;
      scan["intercept"] = fit.intercept;
      scan["reference"] = {{"slope", kReferenceSlope}, {"intercept", kReferenceIntercept}};
      scan["relative_error"] = {{"slope", std::abs(fit.slope / kReferenceSlope - 1.0)},
                                {"intercept", std::abs(fit.intercept / kReferenceIntercept - 1.0)}};
    }
    document["mcrit_scan"] = scan;
  }
  document["provenance"] = provenance(to_json(config), config.seed);
  emit(dir / "spectrum.json", document, out);
  return kExitOk;
}

int cmd_moments(const RunConfig& config, const fs::path& dir, std::ostream& out) {
  const Input input = load_input(config);
  const auto report = expected_sq_norm(config.net, input.mean_sq_norm);
  json document = to_json(report);
  document["closed_form_final"] = expected_sq_norm_closed_form(config.net, input.mean_sq_norm);
  if (config.moments.compensate) {
    const auto& [n1, n2, sigma_w2] = *config.moments.compensate;
    if (n1 < 1 || n2 < 1 || n1 != std::floor(n1) || n2 != std::floor(n2)) {
      throw ConfigError("--compensate widths must be positive integers");
    }
    document["compensating_sigma_w1"] = compensating_sigma(static_cast<int>(n1), static_cast<int>(n2), sigma_w2);
  }
  document["provenance"] = provenance(to_json(config), config.seed);
  emit(dir / "moments.json", document, out);
  return kExitOk;
}

json check(const std::string& name, double value, double threshold, bool pass) {
  return {{"name", name}, {"value", value}, {"threshold", threshold}, {"pass", pass}};
}

int cmd_validate(const RunConfig& config, const fs::path& dir, std::ostream& out) {
  const auto& v = config.validate;
  const Input input = load_input(config);
  const Grid grid = make_grid(config, input);
  KernelCache cache({}, config.workers);
  const auto trace = propagate(config.net, initial_density(input, grid), cache);

  McConfig mc;
  mc.net = config.net;
  if (v.mc_sigma_w) {
    for (auto& layer : mc.net.layers) layer.sigma_w = *v.mc_sigma_w;
  }
  mc.n_samples = v.samples;
  mc.seed = config.seed;
  mc.record_components = true;
  mc.record_all_layers = true;
  mc.workers = config.workers;
  const auto source = input.norms.empty() ? InputSource::fixed_squared_norm(input.mean_sq_norm, config.net.input_width)
                                          : InputSource::squared_norm_pool(input.norms, config.net.input_width);
  const auto run = sample_ensemble(mc, source);

  json checks = json::array();
  const bool relu = all_relu(config.net);
  const auto expected = relu ? expected_sq_norm(config.net, input.mean_sq_norm).expected_sq_norm : std::vector<double>{};
  for (std::size_t l = 1; l <= config.net.depth(); ++l) {
    const double ks = ks_distance(empirical_density(run.layer(l), grid), trace.densities[l]);
    checks.push_back(check("ks_layer_" + std::to_string(l), ks, v.ks_threshold, ks < v.ks_threshold));
    if (relu) {
      const auto stats = sample_stats(run.layer(l));
      const double z = stats.std_error > 0.0 ? std::abs(stats.mean - expected[l]) / stats.std_error
                                             : (stats.mean == expected[l] ? 0.0 : INFINITY);
      checks.push_back(check("mean_z_layer_" + std::to_string(l), z, v.z_threshold, z <= v.z_threshold));
    }
  }

  // Component law of the last layer, compared at 101 empirical quantiles.
  std::vector<double> sorted = run.components;
  std::sort(sorted.begin(), sorted.end());
  double component_ks = 0.0;
  const auto& last = config.net.layers.back();
  if (last.activation.invertible()) {
    for (int q = 0; q <= 100; ++q) {
      const auto idx = static_cast<std::size_t>(q / 100.0 * static_cast<double>(sorted.size() - 1));
      const double x = sorted[idx];
      const double empirical = empirical_component_cdf(run, x);
      const double exact = component_cdf(trace.densities[config.net.depth() - 1], last, x);
      component_ks = std::max(component_ks, std::abs(empirical - exact));
    }
    checks.push_back(check("component_ks", component_ks, v.ks_threshold, component_ks < v.ks_threshold));
  }

  bool pass = true;
  for (const auto& c : checks) pass = pass && c.at("pass").get<bool>();
  json document = {{"pass", pass},
                   {"checks", checks},
                   {"grid", grid_json(grid)},
                   {"samples", v.samples},
                   {"provenance", provenance(to_json(config), config.seed)}};
  emit(dir / "validate.json", document, out);
  out << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kExitOk : kExitCheckFailed;
}

int cmd_ingest(const RunConfig& config, const fs::path& dir, std::ostream& out) {
  if (!config.input.idx) throw ConfigError("ingest needs an IDX file (--idx or input.idx)");
  const Input input = load_input(config);
  const Grid grid = make_grid(config, input);
  const auto density = squared_norm_density(*input.images, grid, config.input.scale);
  fs::create_directories(dir);
  const auto csv = dir / "input_density.csv";
  std::ofstream file(csv);
  if (!file) throw IoError("cannot write " + csv.string());
  write_csv(file, density);
  json document = {{"count", input.images->count},
                   {"rows", input.images->rows},
                   {"cols", input.images->cols},
                   {"mean_sq_norm", input.mean_sq_norm},
                   {"atom0", density.atom0()},
                   {"leaked", density.leaked()},
                   {"grid", grid_json(grid)},
                   {"provenance", provenance(to_json(config), config.seed)}};
  emit(dir / "ingest.json", document, out);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact squared-norm distributions of random fully-connected networks"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);
  app.fallthrough();

  Options options;
  app.add_option("--config", options.config_path, "JSON run configuration");
  app.add_option("--out", options.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", options.seed, "Random seed");
  app.add_option("--grid-points", options.grid_points, "Number of grid cells");
  app.add_option("--grid-max", options.grid_max, "Upper end of the squared-norm grid");
  app.add_option("--layers", options.layers, "Network depth (repeats the last layer)");
  app.add_option("--idx", options.idx, "IDX image file used as the input distribution");
  app.add_option("--workers", options.workers, "Worker threads (0 = all cores)");

  auto* propagate_cmd = app.add_subcommand("propagate", "Layer-wise squared-norm densities");
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Power-function eigenvalues and critical exponents");
  spectrum_cmd->add_option("--mcrit-scan", options.mcrit_scan, "Widths for the critical-exponent fit, e.g. 5,10,20,50");
  auto* moments_cmd = app.add_subcommand("moments", "Closed-form moment propagation");
  moments_cmd->add_option("--compensate", options.compensate, "N1,N2,sigma_w2: first-layer sigma_w keeping the norm");
  auto* validate_cmd = app.add_subcommand("validate", "Operator and moments against Monte Carlo");
  auto* ingest_cmd = app.add_subcommand("ingest", "Squared-norm density of an IDX image file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const RunConfig config = resolve(options);
    const fs::path dir = options.out_dir;
    if (*propagate_cmd) return cmd_propagate(config, dir, out);
    if (*spectrum_cmd) return cmd_spectrum(config, dir, out);
    if (*moments_cmd) return cmd_moments(config, dir, out);
    if (*validate_cmd) return cmd_validate(config, dir, out);
    if (*ingest_cmd) return cmd_ingest(config, dir, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace normprop::cli
