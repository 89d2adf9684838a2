#include "normprop/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <boost/random/normal_distribution.hpp>

#include "normprop/errors.hpp"
#include "normprop/parallel.hpp"

namespace normprop {

namespace {

constexpr std::uint32_t kSampleFileVersion = 1;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256++; fast enough that normal generation, not the engine, dominates.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  explicit Xoshiro256(std::uint64_t seed) {
    for (auto& word : s_) word = splitmix64(seed);
  }

  result_type operator()() noexcept {
    const std::uint64_t result = std::rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

 private:
  std::array<std::uint64_t, 4> s_{};
};

// Independent stream per (seed, sample, layer); layer 0 belongs to the input source.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t sample, std::uint64_t layer) {
  std::uint64_t state = seed;
  std::uint64_t key = splitmix64(state) ^ sample;
  key = splitmix64(key) ^ (layer * 0xd1b54a32d192ed03ULL);
  return splitmix64(key);
}

double squared_norm(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

void write_u64(std::ostream& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t read_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

InputSource InputSource::fixed_vector(std::vector<double> x) {
  if (x.empty()) throw DomainError("input vector is empty");
  InputSource source;
  source.width_ = static_cast<int>(x.size());
  source.vector_ = std::move(x);
  return source;
}

InputSource InputSource::fixed_squared_norm(double z, int width) {
  if (!(z >= 0.0)) throw DomainError("squared norm must be nonnegative");
  if (width < 1) throw DomainError("input width must be >= 1");
  std::vector<double> x(static_cast<std::size_t>(width), 0.0);
  x[0] = std::sqrt(z);
  return fixed_vector(std::move(x));
}

InputSource InputSource::squared_norm_pool(std::vector<double> pool, int width) {
  if (pool.empty()) throw DomainError("squared-norm pool is empty");
  if (width < 1) throw DomainError("input width must be >= 1");
  for (double z : pool) {
    if (!(z >= 0.0)) throw DomainError("squared norm must be nonnegative");
  }
  InputSource source;
  source.width_ = width;
  source.pool_ = std::move(pool);
  return source;
}

void InputSource::fill(std::uint64_t seed, std::uint64_t sample, std::vector<double>& x) const {
  if (pool_.empty()) {
    x = vector_;
    return;
  }
  x.assign(static_cast<std::size_t>(width_), 0.0);
  std::uint64_t state = stream_seed(seed, sample, 0);
  x[0] = std::sqrt(pool_[splitmix64(state) % pool_.size()]);
}

std::span<const double> McRun::layer(std::size_t l) const {
  if (l > config.net.depth()) throw OutOfRangeError("layer index beyond network depth");
  if (config.record_all_layers) return sq_norms[l];
  if (l != config.net.depth()) throw StateError("only the final layer was recorded");
  return sq_norms.back();
}

McRun sample_ensemble(const McConfig& config, const InputSource& input) {
  config.net.validate();
  if (config.n_samples < 1) throw DomainError("n_samples must be >= 1");
  if (input.width() != config.net.input_width) {
    throw DomainError("input width " + std::to_string(input.width()) + " does not match network input width " +
                      std::to_string(config.net.input_width));
  }
  const auto start = std::chrono::steady_clock::now();
  const auto& layers = config.net.layers;
  const std::size_t n = config.n_samples;

  McRun run;
  run.config = config;
  run.sq_norms.assign(config.record_all_layers ? layers.size() + 1 : 1, std::vector<double>(n));
  if (config.record_components) run.components.assign(n, 0.0);

  parallel_for(n, config.workers, [&](std::size_t s) {
    std::vector<double> x;
    std::vector<double> h;
    std::vector<std::size_t> support;
    input.fill(config.seed, s, x);
    if (config.record_all_layers) run.sq_norms[0][s] = squared_norm(x);
    boost::random::normal_distribution<double> normal;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto& layer = layers[l];
      Xoshiro256 engine(stream_seed(config.seed, s, l + 1));
      support.clear();
      for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] != 0.0) support.push_back(j);
      }
      h.resize(static_cast<std::size_t>(layer.width));
      const bool relu = layer.activation.is_relu();
      for (auto& out : h) {
        double acc = 0.0;
        for (std::size_t j : support) acc += normal(engine) * x[j];
        double pre = layer.sigma_w * acc;
        if (layer.sigma_b > 0.0) pre += layer.sigma_b * normal(engine);
        out = relu ? (pre > 0.0 ? pre : 0.0) : layer.activation.forward(pre);
      }
      x.swap(h);
      if (config.record_all_layers) run.sq_norms[l + 1][s] = squared_norm(x);
    }
    if (!config.record_all_layers) run.sq_norms[0][s] = squared_norm(x);
    if (config.record_components) run.components[s] = x[0];
  });

  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

double empirical_component_cdf(const McRun& run, double x) {
  if (!run.config.record_components) throw StateError("components were not recorded");
  const auto below = std::count_if(run.components.begin(), run.components.end(), [x](double v) { return v <= x; });
  return static_cast<double>(below) / static_cast<double>(run.components.size());
}

SampleStats sample_stats(std::span<const double> samples) {
  if (samples.empty()) throw DomainError("no samples");
  const auto n = static_cast<double>(samples.size());
  double mean = 0.0;
  std::size_t zeros = 0;
  for (double v : samples) {
    mean += v;
    if (v == 0.0) ++zeros;
  }
  mean /= n;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double variance = samples.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, variance, std::sqrt(variance / n), static_cast<double>(zeros) / n};
}

void write_samples(const std::filesystem::path& path, std::span<const double> samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write("MCSN", 4);
  write_u32(out, kSampleFileVersion);
  write_u64(out, samples.size());
  for (double v : samples) write_u64(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<double> read_samples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::array<unsigned char, 16> header{};
  if (!in.read(reinterpret_cast<char*>(header.data()), header.size())) {
    throw TruncationError("sample file shorter than its 16-byte header");
  }
  if (std::memcmp(header.data(), "MCSN", 4) != 0) throw FormatError("sample file magic is not MCSN");
  const auto version = static_cast<std::uint32_t>(read_le(header.data() + 4, 4));
  if (version != kSampleFileVersion) throw FormatError("unsupported sample file version " + std::to_string(version));
  const std::uint64_t count = read_le(header.data() + 8, 8);
  std::vector<double> samples;
  samples.reserve(count);
  std::array<unsigned char, 8> word{};
  for (std::uint64_t i = 0; i < count; ++i) {
    if (!in.read(reinterpret_cast<char*>(word.data()), word.size())) {
      throw TruncationError("sample file declares " + std::to_string(count) + " values but holds " +
                            std::to_string(i));
    }
    samples.push_back(std::bit_cast<double>(read_le(word.data(), 8)));
  }
  return samples;
}

nlohmann::json summary_json(const McRun& run, bool include_timing) {
  auto layers = nlohmann::json::array();
  const std::size_t first = run.config.record_all_layers ? 0 : run.config.net.depth();
  for (std::size_t i = 0; i < run.sq_norms.size(); ++i) {
    const auto stats = sample_stats(run.sq_norms[i]);
    layers.push_back({{"layer", first + i},
                      {"mean", stats.mean},
                      {"variance", stats.variance},
                      {"std_error", stats.std_error},
                      {"zero_fraction", stats.zero_fraction}});
  }
  nlohmann::json out{{"n_samples", run.config.n_samples}, {"seed", run.config.seed}, {"layers", layers}};
  if (run.config.record_components) {
    const auto stats = sample_stats(run.components);
    out["component"] = {{"mean", stats.mean}, {"variance", stats.variance}, {"std_error", stats.std_error}};
  }
  if (include_timing) out["wall_seconds"] = run.wall_seconds;
  return out;
}

}  // namespace normprop
