#include "normprop/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "fft.hpp"
#include "normprop/errors.hpp"
#include "normprop/parallel.hpp"
#include "normprop/special.hpp"

namespace normprop {

namespace {

// Binomial weights 0.5^N C(N, k) more than this many nats below the largest are dropped.
constexpr double kTruncationNats = 40.0;

/// Continuous part of the ReLU squared-norm law in units of sigma_y^2:
/// G(x) = sum_k 0.5^N C(N, k) P(k/2, x/2), the CDF of the chi-squared mixture
/// without the atom. Consecutive k of equal parity are linked by
/// P(a + 1, t) = P(a, t) - t^a e^-t / Gamma(a + 1), so each evaluation costs two
/// incomplete gamma calls plus one multiply-add per retained term.
class ReluChiMixture {
 public:
  explicit ReluChiMixture(int width) : width_(width) {
    std::vector<double> log_w(static_cast<std::size_t>(width) + 1);
    double top = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= width; ++k) {
      log_w[k] = special::log_binomial(width, k) - width * std::numbers::ln2;
      top = std::max(top, log_w[k]);
    }
    k_lo_ = width;
    k_hi_ = 1;
    for (int k = 1; k <= width; ++k) {
      if (log_w[k] >= top - kTruncationNats) {
        k_lo_ = std::min(k_lo_, k);
        k_hi_ = std::max(k_hi_, k);
      }
    }
    weights_.assign(static_cast<std::size_t>(width) + 1, 0.0);
    for (int k = k_lo_; k <= k_hi_; ++k) {
      weights_[k] = std::exp(log_w[k]);
      total_ += weights_[k];
    }
    const double a_hi = 0.5 * k_hi_;
    saturation_ = a_hi + kTruncationNats * std::sqrt(a_hi) + kTruncationNats;
  }

  double total() const noexcept { return total_; }

  double cdf(double x) const {
    if (!(x > 0.0)) return 0.0;
    const double t = 0.5 * x;
    if (t > saturation_) return total_;
    double acc = 0.0;
    for (int first : {k_lo_, k_lo_ + 1}) {
      if (first > k_hi_) continue;
      double a = 0.5 * first;
      double p = special::gamma_p(a, t);
      const double log_t = std::log(t);
      double term = std::exp(a * log_t - t - special::log_gamma(a + 1.0));
      for (int k = first; k <= k_hi_; k += 2) {
        acc += weights_[k] * p;
        p = std::max(0.0, p - term);
        a += 1.0;
        if (term < 1e-290 && t > a) {
          // Terms still growing out of underflow; re-anchor in log space.
          term = std::exp(a * log_t - t - special::log_gamma(a + 1.0));
        } else {
          term *= t / a;
        }
      }
    }
    return std::min(acc, total_);
  }

 private:
  int width_;
  int k_lo_ = 1;
  int k_hi_ = 1;
  std::vector<double> weights_;
  double total_ = 0.0;
  double saturation_ = 0.0;
};

MixedDensity relu_row(const ReluChiMixture& mixture, const LayerSpec& layer, double y, const Grid& grid) {
  const double sigma = pre_activation_std(layer, y);
  if (sigma == 0.0) return MixedDensity::atom(grid);
  const double scale = 1.0 / (sigma * sigma);
  const double atom = std::exp(-layer.width * std::numbers::ln2);
  std::vector<double> masses(grid.size(), 0.0);
  double previous = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double current = mixture.cdf(grid.upper_edge(i) * scale);
    masses[i] = current - previous;
    previous = current;
    if (current >= mixture.total()) break;
  }
  return MixedDensity::from_masses(grid, atom, masses);
}

std::complex<double> integer_power(std::complex<double> base, int exponent) {
  std::complex<double> result(1.0, 0.0);
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

detail::RealFft& cached_fft(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<detail::RealFft>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<detail::RealFft>(n);
  return *slot;
}

/// Single-component law of phi(h)^2 on the lattice {J * step}: the atom q = P(phi(h) = 0)
/// and masses m[J] = P(phi(h)^2 in ((J - 1/2) step, (J + 1/2) step]), J = 0 collecting (0, step/2].
class ComponentLaw {
 public:
  ComponentLaw(const Activation& activation, double sigma, double step, const GenericKernelOptions& options)
      : activation_(activation), sigma_(sigma), step_(step) {
    if (!activation.invertible()) draw_samples(options);
  }

  double atom() const {
    if (!samples_.empty()) return sampled_atom_;
    return squared_cdf(0.0);
  }

  std::vector<double> lattice_masses(std::size_t count) const {
    std::vector<double> m(count, 0.0);
    if (!samples_.empty()) {
      const double w = 1.0 / static_cast<double>(total_draws_);
      for (double s : samples_) {
        const double j = std::ceil(s / step_ - 0.5);
        if (j < static_cast<double>(count)) m[static_cast<std::size_t>(std::max(j, 0.0))] += w;
      }
      return m;
    }
    const double q = squared_cdf(0.0);
    double previous = squared_cdf(0.5 * step_);
    m[0] = previous - q;
    for (std::size_t j = 1; j < count; ++j) {
      const double current = squared_cdf((static_cast<double>(j) + 0.5) * step_);
      m[j] = current - previous;
      previous = current;
    }
    return m;
  }

 private:
  // P(phi(h)^2 <= t) = P(phi(h) <= sqrt t) - P(phi(h) < -sqrt t).
  double squared_cdf(double t) const {
    const double r = std::sqrt(t);
    const auto& lower = activation_.lower_inverse ? activation_.lower_inverse : activation_.generalized_inverse;
    return special::std_normal_cdf(activation_.generalized_inverse(r) / sigma_) -
           special::std_normal_cdf(lower(-r) / sigma_);
  }

  void draw_samples(const GenericKernelOptions& options) {
    total_draws_ = options.fallback_draws;
    if (total_draws_ == 0) throw DomainError("fallback_draws must be positive");
    boost::random::mt19937_64 engine(options.fallback_seed);
    boost::random::normal_distribution<double> normal(0.0, sigma_);
    std::size_t zeros = 0;
    samples_.reserve(total_draws_);
    for (std::size_t i = 0; i < total_draws_; ++i) {
      const double v = activation_.forward(normal(engine));
      if (v == 0.0) {
        ++zeros;
      } else {
        samples_.push_back(v * v);
      }
    }
    sampled_atom_ = static_cast<double>(zeros) / static_cast<double>(total_draws_);
  }

  const Activation& activation_;
  double sigma_;
  double step_;
  std::vector<double> samples_;
  std::size_t total_draws_ = 0;
  double sampled_atom_ = 0.0;
};

}  // namespace

void LayerSpec::validate() const {
  if (width < 1) throw DomainError("layer width must be >= 1");
  if (!(sigma_w > 0.0) || !std::isfinite(sigma_w)) throw DomainError("sigma_w must be positive");
  if (!(sigma_b >= 0.0) || !std::isfinite(sigma_b)) throw DomainError("sigma_b must be nonnegative");
  if (!activation.forward) throw DomainError("activation has no forward function");
}

std::string LayerSpec::signature() const {
  std::ostringstream out;
  out.precision(17);
  out << "N=" << width << ";sw=" << sigma_w << ";sb=" << sigma_b << ";phi=" << activation.name;
  return out.str();
}

double pre_activation_std(const LayerSpec& layer, double y) {
  if (y < 0.0) throw DomainError("squared norm must be nonnegative");
  return std::sqrt(layer.sigma_w * layer.sigma_w * y + layer.sigma_b * layer.sigma_b);
}

MixedDensity relu_kernel_row(const LayerSpec& layer, double y, const Grid& grid) {
  layer.validate();
  if (!layer.activation.is_relu()) {
    throw WrongKernelError("closed-form kernel requires relu, got '" + layer.activation.name + "'");
  }
  return relu_row(ReluChiMixture(layer.width), layer, y, grid);
}

MixedDensity generic_kernel_row(const LayerSpec& layer, double y, const Grid& grid,
                                const GenericKernelOptions& options) {
  layer.validate();
  if (options.oversample < 1) throw DomainError("oversample must be >= 1");
  const double sigma = pre_activation_std(layer, y);
  const int width = layer.width;

  if (sigma == 0.0) {
    // Every pre-activation is exactly zero.
    const double phi0 = layer.activation.forward(0.0);
    if (phi0 == 0.0) return MixedDensity::atom(grid);
    const double location = width * phi0 * phi0;
    if (location > grid.z_max()) {
      return MixedDensity(grid, 0.0, std::vector<double>(grid.size(), 0.0), 1.0);
    }
    return discretize(PointMass(location), grid);
  }

  const auto r = static_cast<std::size_t>(options.oversample);
  const double step = grid.delta() / static_cast<double>(r);
  const std::size_t lattice_points = grid.size() * r + 1;
  const ComponentLaw law(layer.activation, sigma, step, options);
  const double q = law.atom();
  const double atom = std::pow(q, width);

  std::size_t length = std::bit_ceil(2 * lattice_points);
  std::vector<double> sum;
  for (;;) {
    if (length > options.max_fft_points) {
      throw ResolutionError("kernel row needs more than " + std::to_string(options.max_fft_points) +
                            " FFT points; coarsen the grid or raise max_fft_points");
    }
    const auto masses = law.lattice_masses(length);
    double component_mass = 0.0;
    for (double m : masses) component_mass += m;
    if (std::abs(component_mass - (1.0 - q)) > 1e-3) {
      if (2 * length <= options.max_fft_points) {
        length *= 2;
        continue;
      }
      throw ResolutionError("single-component mass " + std::to_string(component_mass) + " deviates from 1 - q = " +
                            std::to_string(1.0 - q) + " by more than 1e-3");
    }

    auto& fft = cached_fft(length);
    std::copy(masses.begin(), masses.end(), fft.real().begin());
    fft.forward();
    const double inv_length = 1.0 / static_cast<double>(length);
    for (auto& c : fft.spectrum()) {
      // Atom is the convolution identity: (q + c)^N expands into sum_k C(N,k) q^(N-k) c^k.
      c = (integer_power(q + c, width) - atom) * inv_length;
    }
    fft.backward();
    sum.assign(fft.real().begin(), fft.real().end());

    // Circular wrap shows up as mass in the top half of the buffer.
    double top = 0.0;
    for (std::size_t j = length / 2; j < length; ++j) top += std::max(sum[j], 0.0);
    if (top > 1e-10 && 2 * length <= options.max_fft_points) {
      length *= 2;
      continue;
    }
    break;
  }

  // Lattice point J spreads uniformly over [J - 1/2, J + 1/2] * step; points on a
  // cell edge split evenly between the two neighbours.
  std::vector<double> cells(grid.size(), 0.0);
  const std::size_t usable = std::min(sum.size(), lattice_points);
  for (std::size_t j = 0; j < usable; ++j) {
    const double mu = std::max(sum[j], 0.0);
    if (j == 0) {
      cells[0] += mu;
      continue;
    }
    const std::size_t cell = j / r;
    if (j % r == 0) {
      cells[cell - 1] += 0.5 * mu;
      if (cell < grid.size()) cells[cell] += 0.5 * mu;
    } else if (cell < grid.size()) {
      cells[cell] += mu;
    }
  }
  return MixedDensity::from_masses(grid, atom, cells);
}

ConditionalKernel::ConditionalKernel(LayerSpec layer, Grid grid)
    : layer_(std::move(layer)),
      grid_(grid),
      atoms_(grid.size() + 1, 0.0),
      leaked_(grid.size() + 1, 0.0),
      density_((grid.size() + 1) * grid.size(), 0.0) {}

double ConditionalKernel::source_value(std::size_t row) const noexcept {
  return row == 0 ? 0.0 : grid_.center(row - 1);
}

std::span<const double> ConditionalKernel::density(std::size_t row) const noexcept {
  return {density_.data() + row * grid_.size(), grid_.size()};
}

MixedDensity ConditionalKernel::row(std::size_t r) const {
  const auto d = density(r);
  return MixedDensity(grid_, atoms_[r], std::vector<double>(d.begin(), d.end()), leaked_[r]);
}

void ConditionalKernel::set_row(std::size_t r, const MixedDensity& d) {
  if (r >= rows()) throw OutOfRangeError("kernel row index out of range");
  if (!(d.grid() == grid_)) throw DomainError("row grid differs from kernel grid");
  atoms_[r] = d.atom0();
  leaked_[r] = d.leaked();
  std::copy(d.density().begin(), d.density().end(), density_.begin() + static_cast<std::ptrdiff_t>(r * grid_.size()));
}

ConditionalKernel kernel_matrix(const LayerSpec& layer, const Grid& grid, const GenericKernelOptions& options,
                                unsigned workers) {
  layer.validate();
  ConditionalKernel kernel(layer, grid);
  if (layer.activation.is_relu()) {
    const ReluChiMixture mixture(layer.width);
    parallel_for(kernel.rows(), workers, [&](std::size_t r) {
      kernel.set_row(r, relu_row(mixture, layer, kernel.source_value(r), grid));
    });
  } else {
    parallel_for(kernel.rows(), workers, [&](std::size_t r) {
      kernel.set_row(r, generic_kernel_row(layer, kernel.source_value(r), grid, options));
    });
  }
  return kernel;
}

void write_kernel_csv(std::ostream& out, const ConditionalKernel& kernel) {
  const auto old_precision = out.precision(17);
  out << "y,atom0,leaked";
  for (std::size_t j = 0; j < kernel.grid().size(); ++j) out << ",c" << j;
  out << '\n';
  for (std::size_t r = 0; r < kernel.rows(); ++r) {
    out << kernel.source_value(r) << ',' << kernel.atom(r) << ',' << kernel.leaked(r);
    for (double v : kernel.density(r)) out << ',' << v;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace normprop
