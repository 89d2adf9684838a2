#ifndef NORMPROP_KERNELS_HPP_
#define NORMPROP_KERNELS_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "normprop/activation.hpp"
#include "normprop/distributions.hpp"

namespace normprop {

/// One fully-connected layer of the random ensemble: N(0, sigma_w^2) weights,
/// N(0, sigma_b^2) biases, `width` output neurons.
struct LayerSpec {
  int width = 1;
  double sigma_w = 1.0;
  double sigma_b = 0.0;
  Activation activation = Activation::relu();

  void validate() const;
  /// Identifies layers whose transition kernels are identical.
  std::string signature() const;
};

/// sqrt(sigma_w^2 * y + sigma_b^2): std of every pre-activation given |x_prev|^2 = y.
double pre_activation_std(const LayerSpec& layer, double y);

/// Closed-form ReLU row: 0.5^N atom plus the binomial mixture of scaled chi-squared
/// laws, integrated exactly over every cell through the chi-squared CDF.
MixedDensity relu_kernel_row(const LayerSpec& layer, double y, const Grid& grid);

struct GenericKernelOptions {
  /// Sub-lattice points per grid cell used for the convolution.
  int oversample = 8;
  /// Draws used to estimate the single-component law when the activation has no inverse.
  std::size_t fallback_draws = 1'000'000;
  std::uint64_t fallback_seed = 0x9e3779b97f4a7c15ULL;
  /// Upper bound on the FFT length; exceeding it raises ResolutionError.
  std::size_t max_fft_points = std::size_t{1} << 23;
};

/// Any nondecreasing activation: the law of phi(h)^2 is discretized on a sub-lattice
/// and raised to the width-th convolution power in the Fourier domain.
MixedDensity generic_kernel_row(const LayerSpec& layer, double y, const Grid& grid,
                                const GenericKernelOptions& options = {});

/// Discretized transition kernel: one row per source value y in {0} U {cell centers}.
/// Row 0 is y = 0, row r > 0 is y = grid.center(r - 1).
class ConditionalKernel {
 public:
  ConditionalKernel(LayerSpec layer, Grid grid);

  const LayerSpec& layer() const noexcept { return layer_; }
  const Grid& grid() const noexcept { return grid_; }
  std::size_t rows() const noexcept { return grid_.size() + 1; }
  double source_value(std::size_t row) const noexcept;

  double atom(std::size_t row) const noexcept { return atoms_[row]; }
  double leaked(std::size_t row) const noexcept { return leaked_[row]; }
  std::span<const double> density(std::size_t row) const noexcept;
  MixedDensity row(std::size_t row) const;

  void set_row(std::size_t row, const MixedDensity& d);

 private:
  LayerSpec layer_;
  Grid grid_;
  std::vector<double> atoms_;
  std::vector<double> leaked_;
  std::vector<double> density_;  // rows() x grid.size(), row-major
};

/// Builds every row, choosing the closed form for ReLU. Rows are independent;
/// `workers` > 1 evaluates them on that many threads (0 = hardware concurrency).
ConditionalKernel kernel_matrix(const LayerSpec& layer, const Grid& grid,
                                const GenericKernelOptions& options = {}, unsigned workers = 1);

/// Dense CSV dump: `y,atom0,leaked,c0,...,c{n-1}` with one line per kernel row.
void write_kernel_csv(std::ostream& out, const ConditionalKernel& kernel);

}  // namespace normprop

#endif  // NORMPROP_KERNELS_HPP_
