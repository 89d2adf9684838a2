#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "normprop/activation.hpp"
#include "normprop/errors.hpp"
#include "normprop/special.hpp"

using namespace normprop;

TEST(Activation, ZeroMassProbability) {
  EXPECT_DOUBLE_EQ(Activation::relu().zero_mass_probability(0.7), 0.5);
  EXPECT_DOUBLE_EQ(Activation::relu().zero_mass_probability(0.0), 1.0);
  EXPECT_DOUBLE_EQ(Activation::identity().zero_mass_probability(2.0), 0.0);
  EXPECT_DOUBLE_EQ(Activation::tanh().zero_mass_probability(2.0), 0.0);
  EXPECT_DOUBLE_EQ(Activation::leaky_relu(0.1).zero_mass_probability(2.0), 0.0);
  EXPECT_THROW(Activation::custom("f", [](double x) { return x; }).zero_mass_probability(1.0), StateError);
}

TEST(Activation, FromName) {
  EXPECT_TRUE(Activation::from_name("relu").is_relu());
  EXPECT_EQ(Activation::from_name("linear").kind, ActivationKind::identity);
  EXPECT_EQ(Activation::from_name("leaky_relu:0.2").forward(-1.0), -0.2);
  EXPECT_THROW(Activation::from_name("swish"), ConfigError);
  EXPECT_THROW(Activation::from_name("leaky_relu:abc"), ConfigError);
}

// P(phi(h) <= u) = Phi(inv(u) / sigma), checked against sampling for every built-in.
TEST(Activation, GeneralizedInverseGivesTheCdf) {
  std::mt19937_64 rng(5);
  const double sigma = 1.3;
  std::normal_distribution<double> normal(0.0, sigma);
  std::vector<double> h(200'000);
  for (auto& v : h) v = normal(rng);
  for (const auto& phi : {Activation::relu(), Activation::identity(), Activation::leaky_relu(0.3), Activation::tanh(),
                          Activation::hard_tanh()}) {
    for (double u : {-1.5, -0.9, -0.2, 0.0, 0.4, 0.99, 1.0, 2.0}) {
      double below = 0.0;
      double strictly_below = 0.0;
      for (double v : h) {
        below += phi.forward(v) <= u;
        strictly_below += phi.forward(v) < u;
      }
      below /= h.size();
      strictly_below /= h.size();
      EXPECT_NEAR(special::std_normal_cdf(phi.generalized_inverse(u) / sigma), below, 4e-3) << phi.name << " " << u;
      EXPECT_NEAR(special::std_normal_cdf(phi.lower_inverse(u) / sigma), strictly_below, 4e-3) << phi.name << " " << u;
    }
  }
}

TEST(Activation, ForwardIsNondecreasing) {
  for (const auto& phi : {Activation::relu(), Activation::leaky_relu(0.01), Activation::tanh(), Activation::hard_tanh()}) {
    double previous = phi.forward(-10.0);
    for (double x = -10.0; x <= 10.0; x += 0.01) {
      EXPECT_GE(phi.forward(x), previous);
      previous = phi.forward(x);
    }
  }
}
