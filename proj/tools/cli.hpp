#ifndef NORMPROP_TOOLS_CLI_HPP_
#define NORMPROP_TOOLS_CLI_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "normprop/operator.hpp"

namespace normprop::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

struct GridConfig {
  std::optional<double> z_max;  // default: 8x the input mean squared norm
  std::size_t n_points = 4096;
};

struct InputConfig {
  std::optional<double> squared_norm;
  std::optional<std::filesystem::path> idx;
  double scale = 255.0;
};

struct SpectrumConfig {
  std::vector<int> widths{10, 20, 100};
  std::optional<double> sigma_w;  // default: critical sqrt(2 / N) per width
  double m_min = -40.0;
  double m_max = -0.75;
  std::size_t samples = 400;
  std::size_t discretized_top_k = 0;
  std::vector<int> mcrit_scan;
};

struct MomentsConfig {
  std::optional<std::array<double, 3>> compensate;  // N1, N2, sigma_w2
};

struct ValidateConfig {
  std::size_t samples = 100'000;
  double ks_threshold = 0.02;
  double z_threshold = 3.0;
  /// Replaces sigma_w of every layer on the Monte Carlo side only (sanity inversion).
  std::optional<double> mc_sigma_w;
};

struct RunConfig {
  NetworkSpec net;
  GridConfig grid;
  InputConfig input;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  SpectrumConfig spectrum;
  MomentsConfig moments;
  ValidateConfig validate;
};

/// The default run: N = 200, sigma_w = 0.1, sigma_b = 0, nine ReLU layers on 784 inputs
/// fed with the MNIST mean squared norm.
nlohmann::json default_config();

/// Strict parse; unknown keys and out-of-range values raise ConfigError.
RunConfig parse_config(const nlohmann::json& document);

/// Canonical JSON echo of a parsed config (hashed into the provenance block).
nlohmann::json to_json(const RunConfig& config);

/// Full command line; returns the process exit code. Diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace normprop::cli

#endif  // NORMPROP_TOOLS_CLI_HPP_
