#ifndef NORMPROP_MONTECARLO_HPP_
#define NORMPROP_MONTECARLO_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "normprop/distributions.hpp"
#include "normprop/operator.hpp"

namespace normprop {

/// Where the network inputs come from. Only |x^(0)|^2 matters for the ensemble law, so a
/// squared norm z is represented by the spike (sqrt z, 0, ..., 0).
class InputSource {
 public:
  static InputSource fixed_vector(std::vector<double> x);
  static InputSource fixed_squared_norm(double z, int width);
  /// Each sample draws one squared norm uniformly from `pool` (e.g. a dataset's norms).
  static InputSource squared_norm_pool(std::vector<double> pool, int width);

  int width() const noexcept { return width_; }
  /// Input of sample `sample` under seed `seed`; deterministic.
  void fill(std::uint64_t seed, std::uint64_t sample, std::vector<double>& x) const;

 private:
  InputSource() = default;
  int width_ = 0;
  std::vector<double> vector_;
  std::vector<double> pool_;
};

struct McConfig {
  NetworkSpec net;
  std::size_t n_samples = 100'000;
  std::uint64_t seed = 0;
  bool record_components = false;
  bool record_all_layers = true;
  /// Threads; results do not depend on this.
  unsigned workers = 1;
};

struct McRun {
  McConfig config;
  /// Squared norms per recorded layer. With record_all_layers entry l is layer l (0 = input),
  /// otherwise there is one entry holding layer L.
  std::vector<std::vector<double>> sq_norms;
  /// x_1^(L) per sample when record_components is set.
  std::vector<double> components;
  double wall_seconds = 0.0;

  std::span<const double> final_sq_norms() const { return sq_norms.back(); }
  /// Squared norms of layer l; needs record_all_layers unless l = L.
  std::span<const double> layer(std::size_t l) const;
};

/// Draws a fresh network per sample (weights N(0, sigma_w^2), biases N(0, sigma_b^2)) and
/// pushes that sample's input through it. Weights multiplying exactly-zero inputs are not
/// drawn, which leaves every pre-activation law unchanged. Each (sample, layer) pair has
/// its own counter-derived random stream, so runs are reproducible for any worker count.
McRun sample_ensemble(const McConfig& config, const InputSource& input);

/// Fraction of recorded x_1^(L) samples <= x.
double empirical_component_cdf(const McRun& run, double x);

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
  double zero_fraction = 0.0;
};
SampleStats sample_stats(std::span<const double> samples);

/// Flat binary: "MCSN", u32 version, u64 count, then little-endian f64 values.
void write_samples(const std::filesystem::path& path, std::span<const double> samples);
std::vector<double> read_samples(const std::filesystem::path& path);

/// Per-layer statistics; wall time only when asked so repeated runs compare byte-equal.
nlohmann::json summary_json(const McRun& run, bool include_timing = false);

}  // namespace normprop

#endif  // NORMPROP_MONTECARLO_HPP_
