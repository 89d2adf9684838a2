#include "normprop/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "normprop/errors.hpp"
#include "normprop/special.hpp"
#include "transition.hpp"

namespace normprop {

namespace {

template <class LogLambda>
double solve_unit_eigenvalue(LogLambda&& log_lambda, const RootOptions& options) {
  if (!(options.start < -1.0) || !(options.limit <= options.start)) {
    throw DomainError("root bracket must start below -1");
  }
  // log lambda(-1) < 0 always (lambda(-1) = 1 - 0.5^N); grow the bracket downwards.
  double hi = -1.0;
  double lo = options.start;
  while (log_lambda(lo) < 0.0) {
    hi = lo;
    lo *= 2.0;
    if (lo < options.limit) {
      throw NoRootError("lambda(m) stays below 1 for m in [" + std::to_string(options.limit) + ", -1]",
                        options.limit);
    }
  }
  while (hi - lo > options.tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (log_lambda(mid) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void require_relu_chain(const NetworkSpec& net) {
  net.validate();
  for (const auto& layer : net.layers) {
    if (!layer.activation.is_relu() || layer.sigma_b != 0.0) {
      throw DomainError("stationarity exponents need ReLU layers with sigma_b = 0");
    }
  }
}

}  // namespace

double log_relu_eigenvalue(int width, double sigma_w, double m) {
  if (width < 1) throw DomainError("width must be >= 1");
  if (!(sigma_w > 0.0)) throw DomainError("sigma_w must be positive");
  if (!(m < -0.5)) throw DomainError("power-function eigenvalues need m < -1/2");
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(width));
  for (int k = 1; k <= width; ++k) {
    const double a = 0.5 * k;
    terms.push_back(special::log_binomial(width, k) + special::log_gamma(a - m - 1.0) - special::log_gamma(a));
  }
  return -(width + m + 1.0) * std::numbers::ln2 - (2.0 * m + 2.0) * std::log(sigma_w) +
         special::log_sum_exp(terms);
}

double relu_eigenvalue(int width, double sigma_w, double m) {
  return std::exp(log_relu_eigenvalue(width, sigma_w, m));
}

double m_crit(int width, double sigma_w, const RootOptions& options) {
  log_relu_eigenvalue(width, sigma_w, -1.5);  // validates arguments
  return solve_unit_eigenvalue([&](double m) { return log_relu_eigenvalue(width, sigma_w, m); }, options);
}

double multi_layer_stationarity(const NetworkSpec& net, double m) {
  require_relu_chain(net);
  double log_product = 0.0;
  for (const auto& layer : net.layers) log_product += log_relu_eigenvalue(layer.width, layer.sigma_w, m);
  return std::exp(log_product);
}

double network_m_crit(const NetworkSpec& net, const RootOptions& options) {
  require_relu_chain(net);
  return solve_unit_eigenvalue(
      [&](double m) {
        double acc = 0.0;
        for (const auto& layer : net.layers) acc += log_relu_eigenvalue(layer.width, layer.sigma_w, m);
        return acc;
      },
      options);
}

SpectrumReport sweep(int width, double sigma_w, double m_lo, double m_hi, std::size_t n_samples) {
  if (n_samples == 0 || !(m_lo <= m_hi)) throw DomainError("empty m range");
  if (!(m_hi < -0.5)) throw DomainError("m range must lie below -1/2");
  if (n_samples == 1 && m_lo != m_hi) throw DomainError("a single sample needs m_lo == m_hi");
  SpectrumReport report;
  report.width = width;
  report.sigma_w = sigma_w;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double m = n_samples == 1 ? m_lo : m_lo + (m_hi - m_lo) * static_cast<double>(i) / (n_samples - 1.0);
    report.m_values.push_back(m);
    report.lambda_values.push_back(relu_eigenvalue(width, sigma_w, m));
  }
  try {
    report.m_crit = m_crit(width, sigma_w);
  } catch (const NoRootError&) {
  }
  return report;
}

void write_sweep_csv(std::ostream& out, const SpectrumReport& report) {
  const auto old_precision = out.precision(17);
  out << "m,lambda\n";
  for (std::size_t i = 0; i < report.m_values.size(); ++i) {
    out << report.m_values[i] << ',' << report.lambda_values[i] << '\n';
  }
  out.precision(old_precision);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("line fit needs >= 2 paired points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw DomainError("line fit needs distinct x values");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

DiscreteSpectrum discretized_spectrum(const ConditionalKernel& kernel, std::size_t top_k,
                                      const KrylovOptions& options) {
  const std::size_t dim = kernel.rows();
  const LinearMap step = [&](std::span<const double> x, std::span<double> y) {
    detail::push_forward(kernel, Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())),
                         Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())));
  };
  const auto pairs = leading_eigenpairs(dim, step, top_k, options);

  DiscreteSpectrum out;
  for (const auto& p : pairs) {
    out.eigenvalues.push_back(p.value);
    out.residuals.push_back(p.residual);
  }
  // Fix the phase so the entries sum to one (unit mass) when that is possible.
  auto v = pairs.front().vector;
  std::complex<double> total = 0.0;
  for (const auto& c : v) total += c;
  if (std::abs(total) > 1e-12) {
    for (auto& c : v) c /= total;
  }
  out.dominant_vector = v;

  // Entries at the solver's noise level (relative to the largest) count as zero.
  double largest = 0.0;
  for (const auto& c : v) largest = std::max(largest, std::abs(c));
  const double noise = 1e-7 * largest;
  bool real_nonnegative = std::abs(total) > 1e-12 && std::abs(pairs.front().value.imag()) < 1e-12;
  std::vector<double> masses(v.size());
  for (std::size_t i = 0; i < v.size() && real_nonnegative; ++i) {
    if (std::abs(v[i].imag()) > noise || v[i].real() < -noise) real_nonnegative = false;
    masses[i] = std::max(v[i].real(), 0.0);
  }
  if (real_nonnegative) {
    double sum = 0.0;
    for (double x : masses) sum += x;
    for (double& x : masses) x /= sum;
    out.dominant_density =
        MixedDensity::from_masses(kernel.grid(), masses[0], std::span<const double>(masses).subspan(1));
  }
  return out;
}

nlohmann::json to_json(const DiscreteSpectrum& spectrum) {
  auto pairs = nlohmann::json::array();
  for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
    pairs.push_back({{"re", spectrum.eigenvalues[i].real()},
                     {"im", spectrum.eigenvalues[i].imag()},
                     {"residual", spectrum.residuals[i]}});
  }
  nlohmann::json out{{"eigenvalues", pairs}};
  if (spectrum.dominant_density) {
    out["dominant_atom0"] = spectrum.dominant_density->atom0();
    out["dominant_mean"] = mean(*spectrum.dominant_density);
  }
  return out;
}

std::vector<double> power_function_response(const ConditionalKernel& kernel, double m) {
  const Grid& grid = kernel.grid();
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd f(n + 1);
  f(0) = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) f(i + 1) = std::pow(grid.center(static_cast<std::size_t>(i)), m) * grid.delta();
  const Eigen::VectorXd response = detail::density_matrix(kernel).transpose() * f;
  std::vector<double> ratios(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) ratios[j] = response(static_cast<Eigen::Index>(j)) / std::pow(grid.center(j), m);
  return ratios;
}

}  // namespace normprop
