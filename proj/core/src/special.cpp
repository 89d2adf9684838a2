#include "normprop/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "normprop/errors.hpp"

namespace normprop::special {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7,
};

constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 100000;

// ln of x^a e^-x / Gamma(a), the common prefactor of both incomplete gamma expansions.
double log_prefactor(double a, double x) { return a * std::log(x) - x - log_gamma(a); }

double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double total = term;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    total += term;
    if (std::abs(term) < std::abs(total) * kEps) break;
  }
  return total * std::exp(log_prefactor(a, x));
}

// Q(a, x) by the modified Lentz algorithm.
double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_prefactor(a, x)) * h;
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) {
    throw DomainError("log_gamma requires x > 0, got " + std::to_string(x));
  }
  if (std::isinf(x)) return x;
  if (x < 0.5) {
    // Gamma(x) = Gamma(x + 1) / x keeps the Lanczos sum in its accurate range.
    return log_gamma(x + 1.0) - std::log(x);
  }
  const double xm1 = x - 1.0;
  double series = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) series += kLanczos[i] / (xm1 + static_cast<double>(i));
  const double t = xm1 + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (xm1 + 0.5) * std::log(t) - t + std::log(series);
}

double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw DomainError("gamma_p requires a > 0");
  if (!(x >= 0.0)) throw DomainError("gamma_p requires x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return std::min(1.0, gamma_p_series(a, x));
  return std::clamp(1.0 - gamma_q_continued_fraction(a, x), 0.0, 1.0);
}

double chi2_log_pdf(int k, double z) {
  if (k < 1) throw DomainError("chi-squared needs k >= 1");
  if (z < 0.0) return -std::numeric_limits<double>::infinity();
  const double half_k = 0.5 * k;
  if (z == 0.0) {
    if (k == 1) return std::numeric_limits<double>::infinity();
    if (k == 2) return -std::numbers::ln2;
    return -std::numeric_limits<double>::infinity();
  }
  return (half_k - 1.0) * std::log(z) - 0.5 * z - half_k * std::numbers::ln2 - log_gamma(half_k);
}

double chi2_pdf(int k, double z) { return std::exp(chi2_log_pdf(k, z)); }

double chi2_cdf(int k, double z) {
  if (k < 1) throw DomainError("chi-squared needs k >= 1");
  if (z <= 0.0) return 0.0;
  return gamma_p(0.5 * k, 0.5 * z);
}

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double std_normal_cdf(double x) {
  if (std::isnan(x)) return x;
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double log_binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) {
    throw DomainError("log_binomial requires 0 <= k <= n");
  }
  if (k == 0 || k == n) return 0.0;
  return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

}  // namespace normprop::special
