#ifndef NORMPROP_SPECTRAL_HPP_
#define NORMPROP_SPECTRAL_HPP_

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "normprop/distributions.hpp"
#include "normprop/kernels.hpp"
#include "normprop/operator.hpp"

namespace normprop {

/// Eigenvalue of the ReLU operator (sigma_b = 0) for the power function y^m:
/// lambda = 0.5^(N+m+1) sigma_w^-(2m+2) sum_k C(N,k) Gamma(k/2-m-1) / Gamma(k/2).
/// Defined for m < -1/2 only.
double relu_eigenvalue(int width, double sigma_w, double m);
double log_relu_eigenvalue(int width, double sigma_w, double m);

struct RootOptions {
  /// The bracket grows from `start` by doubling until lambda >= 1 or it passes `limit`.
  double start = -2.0;
  double limit = -1e4;
  double tolerance = 1e-10;
};

/// Exponent m < -1 with lambda(m) = 1.
double m_crit(int width, double sigma_w, const RootOptions& options = {});

/// prod_l lambda_{l,m}; every layer must be ReLU with sigma_b = 0.
double multi_layer_stationarity(const NetworkSpec& net, double m);
double network_m_crit(const NetworkSpec& net, const RootOptions& options = {});

struct SpectrumReport {
  int width = 0;
  double sigma_w = 0.0;
  std::vector<double> m_values;
  std::vector<double> lambda_values;
  /// Empty when no root was found on the searched range.
  std::optional<double> m_crit;
};

/// lambda on n_samples equidistant m in [m_lo, m_hi], plus m_crit.
SpectrumReport sweep(int width, double sigma_w, double m_lo, double m_hi, std::size_t n_samples);
/// `m,lambda` table.
void write_sweep_csv(std::ostream& out, const SpectrumReport& report);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// ---- iterative eigensolver ------------------------------------------------

/// y = A x for a real operator of dimension dim.
using LinearMap = std::function<void(std::span<const double> x, std::span<double> y)>;

struct KrylovOptions {
  /// Krylov subspace size; 0 picks max(2k + 1, k + 24).
  std::size_t subspace = 0;
  std::size_t max_restarts = 400;
  /// Ritz residual target relative to the largest Ritz value.
  double tolerance = 1e-13;
  /// Pairs whose true residual |Av - lambda v| / |v| exceeds this raise ConvergenceError.
  double max_residual = 1e-8;
  std::uint64_t seed = 0x5eed;
};

struct EigenPair {
  std::complex<double> value;
  std::vector<std::complex<double>> vector;  // unit 2-norm
  double residual = 0.0;                     // |A v - lambda v| / |v|
};

/// Leading eigenpairs by modulus via restarted complex Krylov-Schur iteration.
std::vector<EigenPair> leading_eigenpairs(std::size_t dim, const LinearMap& apply, std::size_t top_k,
                                          const KrylovOptions& options = {});

struct DiscreteSpectrum {
  std::vector<std::complex<double>> eigenvalues;
  std::vector<double> residuals;
  /// Dominant eigenvector as state masses (atom first, then cells).
  std::vector<std::complex<double>> dominant_vector;
  /// The dominant eigenvector scaled to unit mass, when it is real and nonnegative.
  std::optional<MixedDensity> dominant_density;
};

/// Leading eigenvalues of the mass-transition matrix of `kernel` (atom as its own state).
DiscreteSpectrum discretized_spectrum(const ConditionalKernel& kernel, std::size_t top_k,
                                      const KrylovOptions& options = {});
nlohmann::json to_json(const DiscreteSpectrum& spectrum);

/// (T f)(z_j) / z_j^m for f(y) = y^m, one ratio per cell. The y = 0 row is skipped
/// (f is singular there).
std::vector<double> power_function_response(const ConditionalKernel& kernel, double m);

}  // namespace normprop

#endif  // NORMPROP_SPECTRAL_HPP_
