#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/binomial.hpp>
#include <gtest/gtest.h>

#include "normprop/errors.hpp"
#include "normprop/kernels.hpp"

using namespace normprop;

namespace {

LayerSpec relu_layer(int width, double sigma_w, double sigma_b = 0.0) {
  LayerSpec layer;
  layer.width = width;
  layer.sigma_w = sigma_w;
  layer.sigma_b = sigma_b;
  return layer;
}

double total_mass(const MixedDensity& d) {
  double s = d.atom0() + d.leaked();
  for (double v : d.density()) s += v * d.grid().delta();
  return s;
}

// Cell masses of the ReLU row built independently from Boost's chi-squared CDF.
MixedDensity boost_relu_row(int width, double s2, const Grid& grid) {
  const boost::math::binomial_distribution<double> coin(width, 0.5);
  std::vector<double> masses(grid.size(), 0.0);
  for (int k = 1; k <= width; ++k) {
    const double w = boost::math::pdf(coin, k);
    if (w < 1e-300) continue;
    const boost::math::chi_squared_distribution<double> chi(k);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      masses[i] += w * (boost::math::cdf(chi, grid.upper_edge(i) / s2) - boost::math::cdf(chi, grid.lower_edge(i) / s2));
    }
  }
  return MixedDensity::from_masses(grid, std::ldexp(1.0, -width), masses);
}

}  // namespace

TEST(PreActivationStd, Examples) {
  EXPECT_DOUBLE_EQ(pre_activation_std(relu_layer(1, 0.1), 1.0), 0.1);
  EXPECT_EQ(pre_activation_std(relu_layer(1, 0.1), 0.0), 0.0);
  EXPECT_DOUBLE_EQ(pre_activation_std(relu_layer(1, 1.0, 1.0), 3.0), 2.0);
  EXPECT_THROW(pre_activation_std(relu_layer(1, 1.0), -1.0), DomainError);
}

TEST(LayerSpec, Validation) {
  EXPECT_THROW(relu_layer(0, 1.0).validate(), DomainError);
  EXPECT_THROW(relu_layer(3, 0.0).validate(), DomainError);
  EXPECT_THROW(relu_layer(3, 1.0, -0.1).validate(), DomainError);
  EXPECT_EQ(relu_layer(3, 0.5).signature(), relu_layer(3, 0.5).signature());
  EXPECT_NE(relu_layer(3, 0.5).signature(), relu_layer(4, 0.5).signature());
}

TEST(ReluRow, Examples) {
  const Grid grid(4.0, 1024);
  EXPECT_DOUBLE_EQ(relu_kernel_row(relu_layer(3, 1.0), 0.7, grid).atom0(), 0.125);
  EXPECT_EQ(relu_kernel_row(relu_layer(3, 1.0), 0.0, grid).atom0(), 1.0);

  const Grid wide(8.0, 4096);
  const auto row = relu_kernel_row(relu_layer(200, 0.1), 1.0, wide);
  EXPECT_NEAR(mean(row), 1.0, 1e-3);
  EXPECT_THROW(relu_kernel_row(LayerSpec{3, 1.0, 0.0, Activation::tanh()}, 1.0, grid), WrongKernelError);
}

TEST(ReluRow, MatchesIndependentChiSquaredMixture) {
  const Grid grid(30.0, 3000);
  for (int width : {1, 2, 7, 40, 150}) {
    for (double y : {0.3, 2.0}) {
      const auto layer = relu_layer(width, 0.6, 0.2);
      const double s2 = 0.36 * y + 0.04;
      const auto row = relu_kernel_row(layer, y, grid);
      const auto oracle = boost_relu_row(width, s2, grid);
      EXPECT_LT(l1_distance(row, oracle), 1e-10) << width << " " << y;
      EXPECT_NEAR(row.leaked(), oracle.leaked(), 1e-12);
    }
  }
}

TEST(ReluRow, MeanIsAffineInY) {
  const Grid grid(200.0, 4096);
  const auto layer = relu_layer(12, 0.5, 0.3);
  for (double y : {0.5, 1.0, 3.0, 6.0}) {
    const auto row = relu_kernel_row(layer, y, grid);
    EXPECT_LT(row.leaked(), 1e-12);
    EXPECT_NEAR(mean(row), (0.25 * y + 0.09) * 12 / 2.0, 2e-3);
  }
}

TEST(GenericRow, ReluThroughFourierRouteMatchesClosedForm) {
  const Grid grid(40.0, 4096);
  for (int width : {1, 2, 8, 32}) {
    auto layer = relu_layer(width, 0.5);
    const auto closed = relu_kernel_row(layer, 1.0, grid);
    layer.activation.kind = ActivationKind::custom;
    EXPECT_LT(l1_distance(generic_kernel_row(layer, 1.0, grid), closed), 1e-3) << width;
  }
}

TEST(GenericRow, IdentityWidthOneIsScaledChiSquared) {
  const Grid grid(4.0, 2048);
  LayerSpec layer{1, 0.7, 0.0, Activation::identity()};
  const auto row = generic_kernel_row(layer, 1.0, grid);
  const boost::math::chi_squared_distribution<double> chi(1);
  std::vector<double> masses(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    masses[i] = boost::math::cdf(chi, grid.upper_edge(i) / 0.49) - boost::math::cdf(chi, grid.lower_edge(i) / 0.49);
  }
  EXPECT_EQ(row.atom0(), 0.0);
  EXPECT_LT(l1_distance(row, MixedDensity::from_masses(grid, 0.0, masses)), 2e-3);
  EXPECT_LT(ks_distance(row, MixedDensity::from_masses(grid, 0.0, masses)), 1e-3);
}

TEST(GenericRow, IdentityWidthNIsChiSquaredN) {
  const Grid grid(40.0, 4096);
  LayerSpec layer{9, 1.0, 0.0, Activation::identity()};
  const auto row = generic_kernel_row(layer, 1.0, grid);
  const boost::math::chi_squared_distribution<double> chi(9);
  std::vector<double> masses(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    masses[i] = boost::math::cdf(chi, grid.upper_edge(i)) - boost::math::cdf(chi, grid.lower_edge(i));
  }
  EXPECT_LT(l1_distance(row, MixedDensity::from_masses(grid, 0.0, masses)), 1e-3);
}

TEST(GenericRow, RowsAreNormalized) {
  const Grid grid(10.0, 1024);
  for (const auto& phi : {Activation::tanh(), Activation::hard_tanh(), Activation::leaky_relu(0.2)}) {
    for (double y : {0.0, 0.4, 3.0}) {
      const auto row = generic_kernel_row(LayerSpec{6, 0.8, 0.1, phi}, y, grid);
      EXPECT_NEAR(total_mass(row), 1.0, 1e-6) << phi.name << " " << y;
    }
  }
}

TEST(GenericRow, TanhAgainstSampling) {
  const Grid grid(6.0, 600);
  LayerSpec layer{5, 1.1, 0.2, Activation::tanh()};
  const double y = 1.5;
  const double sigma = pre_activation_std(layer, y);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal(0.0, sigma);
  std::vector<double> samples(200'000);
  for (auto& s : samples) {
    s = 0.0;
    for (int i = 0; i < layer.width; ++i) {
      const double v = std::tanh(normal(rng));
      s += v * v;
    }
  }
  EXPECT_LT(ks_distance(generic_kernel_row(layer, y, grid), empirical_density(samples, grid)), 5e-3);
}

TEST(GenericRow, SamplingFallbackForBlackBoxActivation) {
  const Grid grid(20.0, 1024);
  LayerSpec exact{4, 0.9, 0.0, Activation::leaky_relu(0.5)};
  LayerSpec opaque = exact;
  opaque.activation = Activation::custom("leaky", [](double x) { return x > 0 ? x : 0.5 * x; });
  EXPECT_LT(ks_distance(generic_kernel_row(exact, 2.0, grid), generic_kernel_row(opaque, 2.0, grid)), 5e-3);
}

TEST(GenericRow, DegenerateAndCoarseCases) {
  const Grid grid(4.0, 64);
  // sigma_y = 0 with phi(0) != 0: every component equals phi(0).
  auto shifted = Activation::custom("shift", [](double x) { return x + 0.5; });
  shifted.generalized_inverse = [](double u) { return u - 0.5; };
  const auto row = generic_kernel_row(LayerSpec{4, 1.0, 0.0, shifted}, 0.0, grid);
  EXPECT_NEAR(mean(row), 1.0, grid.delta());

  GenericKernelOptions tiny;
  tiny.max_fft_points = 64;
  EXPECT_THROW(generic_kernel_row(LayerSpec{4, 1.0, 0.0, Activation::tanh()}, 1.0, grid, tiny), ResolutionError);
}

TEST(ConditionalKernel, RowsAndInvariants) {
  const Grid grid(20.0, 256);
  const auto kernel = kernel_matrix(relu_layer(5, 0.8), grid);
  EXPECT_EQ(kernel.rows(), 257u);
  EXPECT_EQ(kernel.atom(0), 1.0);
  for (std::size_t r = 1; r < kernel.rows(); ++r) {
    EXPECT_NEAR(kernel.atom(r), 1.0 / 32.0, 1e-12);
    EXPECT_NEAR(total_mass(kernel.row(r)), 1.0, 1e-6);
  }
  const auto biased = kernel_matrix(relu_layer(5, 0.8, 0.5), grid, {}, 2);
  for (std::size_t r = 0; r < biased.rows(); ++r) EXPECT_NEAR(biased.atom(r), 1.0 / 32.0, 1e-12);
}

TEST(ConditionalKernel, WorkerCountDoesNotChangeRows) {
  const Grid grid(10.0, 200);
  const LayerSpec layer{3, 1.0, 0.2, Activation::tanh()};
  const auto a = kernel_matrix(layer, grid, {}, 1);
  const auto b = kernel_matrix(layer, grid, {}, 3);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t j = 0; j < grid.size(); ++j) EXPECT_EQ(a.density(r)[j], b.density(r)[j]);
  }
}

// With sigma_b = 0 the row at c*y equals the row at y with z stretched by c.
TEST(ConditionalKernel, ScalingCovariance) {
  const Grid small(5.0, 1000);
  const Grid large(10.0, 1000);
  const auto layer = relu_layer(6, 0.7);
  const auto a = relu_kernel_row(layer, 1.3, small);
  const auto b = relu_kernel_row(layer, 2.6, large);
  EXPECT_NEAR(a.atom0(), b.atom0(), 1e-15);
  for (std::size_t i = 0; i < small.size(); ++i) EXPECT_NEAR(a.density()[i], 2.0 * b.density()[i], 1e-10);
}

TEST(ConditionalKernel, CsvShape) {
  const Grid grid(2.0, 4);
  std::stringstream out;
  write_kernel_csv(out, kernel_matrix(relu_layer(2, 1.0), grid));
  std::string header;
  std::getline(out, header);
  EXPECT_EQ(header, "y,atom0,leaked,c0,c1,c2,c3");
  int lines = 0;
  for (std::string line; std::getline(out, line);) ++lines;
  EXPECT_EQ(lines, 5);
}
