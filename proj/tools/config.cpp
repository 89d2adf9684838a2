#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string_view>

#include "cli.hpp"
#include "normprop/errors.hpp"
#include "normprop/ingest.hpp"

namespace normprop::cli {

namespace {

using nlohmann::json;

void check_keys(const json& object, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!object.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

double positive(const json& value, const std::string& name) {
  const double v = value.get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(name + " must be positive");
  return v;
}

LayerSpec parse_layer(const json& entry, std::size_t index) {
  const std::string where = "network.layers[" + std::to_string(index) + "]";
  check_keys(entry, {"width", "sigma_w", "sigma_b", "activation", "repeat"}, where);
  LayerSpec layer;
  if (!entry.contains("width")) throw ConfigError(where + " needs a width");
  layer.width = entry.at("width").get<int>();
  if (layer.width < 1) throw ConfigError(where + ".width must be >= 1");
  const json sigma_w = entry.value("sigma_w", json("critical"));
  if (sigma_w.is_string()) {
    if (sigma_w.get<std::string>() != "critical") throw ConfigError(where + ".sigma_w must be a number or \"critical\"");
    layer.sigma_w = std::sqrt(2.0 / layer.width);
  } else {
    layer.sigma_w = positive(sigma_w, where + ".sigma_w");
  }
  layer.sigma_b = entry.value("sigma_b", 0.0);
  if (!(layer.sigma_b >= 0.0)) throw ConfigError(where + ".sigma_b must be >= 0");
  try {
    layer.activation = Activation::from_name(entry.value("activation", std::string("relu")));
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return layer;
}

NetworkSpec parse_network(const json& network) {
  check_keys(network, {"input_width", "layers"}, "network");
  NetworkSpec net;
  net.input_width = network.value("input_width", 784);
  if (net.input_width < 1) throw ConfigError("network.input_width must be >= 1");
  if (!network.contains("layers") || !network.at("layers").is_array()) {
    throw ConfigError("network.layers must be an array");
  }
  const auto& layers = network.at("layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec layer = parse_layer(layers[i], i);
    const int repeat = layers[i].value("repeat", 1);
    if (repeat < 1) throw ConfigError("network.layers[" + std::to_string(i) + "].repeat must be >= 1");
    net.layers.insert(net.layers.end(), static_cast<std::size_t>(repeat), layer);
  }
  if (net.layers.empty()) throw ConfigError("network needs at least one layer");
  return net;
}

std::vector<int> parse_widths(const json& value, const std::string& name) {
  auto widths = value.get<std::vector<int>>();
  for (int w : widths) {
    if (w < 1) throw ConfigError(name + " entries must be >= 1");
  }
  return widths;
}

}  // namespace

json default_config() {
  return {{"network",
           {{"input_width", 784},
            {"layers", json::array({{{"width", 200}, {"sigma_w", 0.1}, {"sigma_b", 0.0}, {"activation", "relu"},
                                     {"repeat", 9}}})}}},
          {"grid", {{"n_points", 4096}}},
          {"input", {{"squared_norm", kMnistMeanSquaredNorm}}},
          {"seed", 0}};
}

RunConfig parse_config(const json& document) {
  try {
    check_keys(document, {"network", "grid", "input", "seed", "workers", "spectrum", "moments", "validate"},
               "config");
    RunConfig config;
    config.net = parse_network(document.value("network", default_config().at("network")));

    if (document.contains("grid")) {
      const auto& grid = document.at("grid");
      check_keys(grid, {"z_max", "n_points"}, "grid");
      if (grid.contains("z_max")) config.grid.z_max = positive(grid.at("z_max"), "grid.z_max");
      config.grid.n_points = grid.value("n_points", config.grid.n_points);
      if (config.grid.n_points < 2) throw ConfigError("grid.n_points must be >= 2");
    }

    if (document.contains("input")) {
      const auto& input = document.at("input");
      check_keys(input, {"squared_norm", "idx", "scale"}, "input");
      if (input.contains("squared_norm") && input.contains("idx")) {
        throw ConfigError("input takes either squared_norm or idx, not both");
      }
      if (input.contains("squared_norm")) {
        const double z = input.at("squared_norm").get<double>();
        if (!(z >= 0.0)) throw ConfigError("input.squared_norm must be >= 0");
        config.input.squared_norm = z;
      }
      if (input.contains("idx")) config.input.idx = input.at("idx").get<std::string>();
      if (input.contains("scale")) config.input.scale = positive(input.at("scale"), "input.scale");
    }
    if (!config.input.squared_norm && !config.input.idx) config.input.squared_norm = kMnistMeanSquaredNorm;

    config.seed = document.value("seed", std::uint64_t{0});
    config.workers = document.value("workers", 1u);

    if (document.contains("spectrum")) {
      const auto& s = document.at("spectrum");
      check_keys(s, {"widths", "sigma_w", "m_min", "m_max", "samples", "discretized_top_k", "mcrit_scan"}, "spectrum");
      auto& out = config.spectrum;
      if (s.contains("widths")) out.widths = parse_widths(s.at("widths"), "spectrum.widths");
      if (s.contains("sigma_w") && !s.at("sigma_w").is_string()) out.sigma_w = positive(s.at("sigma_w"), "spectrum.sigma_w");
      out.m_min = s.value("m_min", out.m_min);
      out.m_max = s.value("m_max", out.m_max);
      out.samples = s.value("samples", out.samples);
      out.discretized_top_k = s.value("discretized_top_k", out.discretized_top_k);
      if (s.contains("mcrit_scan")) out.mcrit_scan = parse_widths(s.at("mcrit_scan"), "spectrum.mcrit_scan");
    }
    if (config.spectrum.widths.empty()) throw ConfigError("spectrum.widths is empty");
    if (config.spectrum.samples == 0 || !(config.spectrum.m_min <= config.spectrum.m_max)) {
      throw ConfigError("spectrum m-range is empty");
    }
    if (!(config.spectrum.m_max < -0.5)) throw ConfigError("spectrum.m_max must be below -0.5");

    if (document.contains("moments")) {
      const auto& m = document.at("moments");
      check_keys(m, {"compensate"}, "moments");
      if (m.contains("compensate")) {
        const auto v = m.at("compensate").get<std::vector<double>>();
        if (v.size() != 3) throw ConfigError("moments.compensate needs [N1, N2, sigma_w2]");
        config.moments.compensate = std::array<double, 3>{v[0], v[1], v[2]};
      }
    }

    if (document.contains("validate")) {
      const auto& v = document.at("validate");
      check_keys(v, {"samples", "ks_threshold", "z_threshold", "mc_sigma_w"}, "validate");
      auto& out = config.validate;
      out.samples = v.value("samples", out.samples);
      if (out.samples < 2) throw ConfigError("validate.samples must be >= 2");
      if (v.contains("ks_threshold")) out.ks_threshold = positive(v.at("ks_threshold"), "validate.ks_threshold");
      if (v.contains("z_threshold")) out.z_threshold = positive(v.at("z_threshold"), "validate.z_threshold");
      if (v.contains("mc_sigma_w")) out.mc_sigma_w = positive(v.at("mc_sigma_w"), "validate.mc_sigma_w");
    }
    return config;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

json to_json(const RunConfig& config) {
  auto layers = json::array();
  for (const auto& layer : config.net.layers) {
    layers.push_back({{"width", layer.width},
                      {"sigma_w", layer.sigma_w},
                      {"sigma_b", layer.sigma_b},
                      {"activation", layer.activation.name}});
  }
  json input = {{"scale", config.input.scale}};
  if (config.input.squared_norm) input["squared_norm"] = *config.input.squared_norm;
  if (config.input.idx) input["idx"] = config.input.idx->string();
  json grid = {{"n_points", config.grid.n_points}};
  if (config.grid.z_max) grid["z_max"] = *config.grid.z_max;
  json spectrum = {{"widths", config.spectrum.widths},
                   {"m_min", config.spectrum.m_min},
                   {"m_max", config.spectrum.m_max},
                   {"samples", config.spectrum.samples},
                   {"discretized_top_k", config.spectrum.discretized_top_k},
                   {"mcrit_scan", config.spectrum.mcrit_scan}};
  if (config.spectrum.sigma_w) spectrum["sigma_w"] = *config.spectrum.sigma_w;
  json validate = {{"samples", config.validate.samples},
                   {"ks_threshold", config.validate.ks_threshold},
                   {"z_threshold", config.validate.z_threshold}};
  if (config.validate.mc_sigma_w) validate["mc_sigma_w"] = *config.validate.mc_sigma_w;
  json moments = json::object();
  if (config.moments.compensate) moments["compensate"] = *config.moments.compensate;
  return {{"network", {{"input_width", config.net.input_width}, {"layers", layers}}},
          {"grid", grid},
          {"input", input},
          {"seed", config.seed},
          {"spectrum", spectrum},
          {"moments", moments},
          {"validate", validate}};
}

}  // namespace normprop::cli
