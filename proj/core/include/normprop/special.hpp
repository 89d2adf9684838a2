#ifndef NORMPROP_SPECIAL_HPP_
#define NORMPROP_SPECIAL_HPP_

#include <span>

namespace normprop::special {

/// ln Gamma(x) for x > 0 (Lanczos, g = 7). Absolute error below 1e-13 on [0.5, 200].
double log_gamma(double x);

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
/// Series for x < a + 1, Lentz continued fraction for the complement otherwise.
double gamma_p(double a, double x);

/// Log of the chi-squared density with k degrees of freedom. -inf outside the support.
double chi2_log_pdf(int k, double z);

/// Chi-squared density. Returns +inf for k = 1 at z = 0; quadrature callers
/// integrate that cell through chi2_cdf instead.
double chi2_pdf(int k, double z);

double chi2_cdf(int k, double z);

double std_normal_pdf(double x);
double std_normal_cdf(double x);

/// ln C(n, k).
double log_binomial(int n, int k);

/// ln sum exp(values), stable for very large or very small arguments.
double log_sum_exp(std::span<const double> values);

}  // namespace normprop::special

#endif  // NORMPROP_SPECIAL_HPP_
