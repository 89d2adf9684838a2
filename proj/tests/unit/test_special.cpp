#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "normprop/errors.hpp"
#include "normprop/special.hpp"

namespace sp = normprop::special;

TEST(LogGamma, KnownValues) {
  EXPECT_NEAR(sp::log_gamma(1.0), 0.0, 1e-14);
  EXPECT_NEAR(sp::log_gamma(0.5), 0.5723649429247001, 1e-13);
  EXPECT_NEAR(sp::log_gamma(6.0), std::log(120.0), 1e-13);
}

TEST(LogGamma, MatchesBoostOnWorkingRange) {
  for (double x = 0.5; x <= 200.0; x += 0.173) {
    EXPECT_NEAR(sp::log_gamma(x), boost::math::lgamma(x), 1e-12) << "x=" << x;
  }
}

TEST(LogGamma, SmallArgumentsAndRecurrence) {
  for (double x : {1e-3, 0.01, 0.1, 0.3}) EXPECT_NEAR(sp::log_gamma(x), boost::math::lgamma(x), 1e-11);
  for (double x = 0.5; x <= 50.0; x += 0.37) {
    EXPECT_NEAR(std::exp(sp::log_gamma(x + 1.0)) / (x * std::exp(sp::log_gamma(x))), 1.0, 1e-9);
  }
}

TEST(LogGamma, RejectsNonPositive) {
  EXPECT_THROW(sp::log_gamma(0.0), normprop::DomainError);
  EXPECT_THROW(sp::log_gamma(-2.5), normprop::DomainError);
}

TEST(GammaP, MatchesBoost) {
  for (double a : {0.5, 1.0, 1.5, 4.0, 17.5, 60.0, 250.0}) {
    for (double x : {1e-6, 0.1, 0.5, 1.0, 3.0, 10.0, 55.0, 240.0, 400.0}) {
      EXPECT_NEAR(sp::gamma_p(a, x), boost::math::gamma_p(a, x), 1e-13) << "a=" << a << " x=" << x;
    }
  }
  EXPECT_EQ(sp::gamma_p(2.0, 0.0), 0.0);
}

TEST(Chi2, PdfExamples) {
  EXPECT_DOUBLE_EQ(sp::chi2_pdf(2, 0.0), 0.5);
  // Direct evaluation of z^{-1/2} e^{-z/2} / sqrt(2 pi) at z = 1.
  EXPECT_NEAR(sp::chi2_pdf(1, 1.0), std::exp(-0.5) / std::sqrt(2.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(sp::chi2_pdf(1, 1.0), 0.2419707245, 1e-10);
  EXPECT_TRUE(std::isinf(sp::chi2_pdf(1, 0.0)));
  EXPECT_THROW(sp::chi2_pdf(0, 1.0), normprop::DomainError);
}

TEST(Chi2, PdfAndCdfMatchBoost) {
  for (int k = 1; k <= 40; ++k) {
    const boost::math::chi_squared_distribution<double> law(k);
    for (double z : {0.01, 0.5, 1.0, 2.5, 7.0, 20.0, 61.0}) {
      EXPECT_NEAR(sp::chi2_pdf(k, z), boost::math::pdf(law, z), 1e-13) << k << " " << z;
      EXPECT_NEAR(sp::chi2_cdf(k, z), boost::math::cdf(law, z), 1e-13) << k << " " << z;
    }
  }
}

TEST(Chi2, NormalizationAndMeanByQuadrature) {
  using boost::math::quadrature::gauss_kronrod;
  for (int k = 1; k <= 8; ++k) {
    // Substitute z = t^2 to remove the k = 1 endpoint singularity.
    const auto mass = gauss_kronrod<double, 61>::integrate(
        [k](double t) { return t == 0.0 && k == 1 ? std::sqrt(2.0 / std::numbers::pi) : 2.0 * t * sp::chi2_pdf(k, t * t); },
        0.0, 20.0, 15, 1e-12);
    const auto first = gauss_kronrod<double, 61>::integrate(
        [k](double t) { return t == 0.0 ? 0.0 : 2.0 * t * t * t * sp::chi2_pdf(k, t * t); }, 0.0, 20.0, 15, 1e-12);
    EXPECT_NEAR(mass, 1.0, 1e-6) << k;
    EXPECT_NEAR(first, k, 1e-6) << k;
  }
}

TEST(StdNormal, CdfValues) {
  EXPECT_DOUBLE_EQ(sp::std_normal_cdf(0.0), 0.5);
  EXPECT_NEAR(sp::std_normal_cdf(40.0), 1.0, 1e-15);
  EXPECT_NEAR(sp::std_normal_cdf(1.959963985), 0.975, 1e-8);
  const boost::math::normal_distribution<double> oracle;
  for (double x = -9.0; x <= 9.0; x += 0.05) {
    EXPECT_NEAR(sp::std_normal_cdf(x), boost::math::cdf(oracle, x), 1e-10);
    EXPECT_NEAR(sp::std_normal_cdf(x) + sp::std_normal_cdf(-x), 1.0, 1e-10);
    EXPECT_NEAR(sp::std_normal_pdf(x), boost::math::pdf(oracle, x), 1e-15);
  }
}

TEST(StdNormal, QuantileFromIndependentErfSeries) {
  // Maclaurin series of erf, summed to convergence, as an oracle independent of erfc.
  const double x = 1.959963985 / std::sqrt(2.0);
  double term = x;
  double sum = x;
  for (int n = 1; n < 80; ++n) {
    term *= -x * x / n;
    sum += term / (2 * n + 1);
  }
  EXPECT_NEAR(sp::std_normal_cdf(1.959963985), 0.5 * (1.0 + 2.0 / std::sqrt(std::numbers::pi) * sum), 1e-12);
}

TEST(LogBinomial, Values) {
  EXPECT_EQ(sp::log_binomial(17, 0), 0.0);
  EXPECT_NEAR(sp::log_binomial(4, 2), std::log(6.0), 1e-14);
  for (int n : {10, 100, 1000, 10000}) {
    for (int k : {1, n / 3, n / 2, n - 1}) {
      const double oracle = boost::math::lgamma(n + 1.0) - boost::math::lgamma(k + 1.0) - boost::math::lgamma(n - k + 1.0);
      EXPECT_NEAR(sp::log_binomial(n, k), oracle, 1e-10 * std::max(1.0, std::abs(oracle)));
    }
  }
  EXPECT_THROW(sp::log_binomial(4, 5), normprop::DomainError);
  EXPECT_THROW(sp::log_binomial(4, -1), normprop::DomainError);
}

TEST(LogBinomial, BinomialTheorem) {
  double sum = 0.0;
  for (int k = 0; k <= 20; ++k) sum += std::exp(sp::log_binomial(20, k));
  EXPECT_NEAR(sum / std::ldexp(1.0, 20), 1.0, 1e-6);
}

TEST(LogSumExp, StableForExtremeArguments) {
  const std::vector<double> big{1000.0, 1000.0};
  EXPECT_NEAR(sp::log_sum_exp(big), 1000.0 + std::log(2.0), 1e-12);
  const std::vector<double> tiny{-1000.0, -1001.0};
  EXPECT_NEAR(sp::log_sum_exp(tiny), -1000.0 + std::log1p(std::exp(-1.0)), 1e-12);
}
