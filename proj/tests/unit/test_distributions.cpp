#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "normprop/distributions.hpp"
#include "normprop/errors.hpp"

using namespace normprop;

namespace {

MixedDensity uniform_on(const Grid& grid, double a, double b) {
  std::vector<double> masses(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double lo = std::max(a, grid.lower_edge(i));
    const double hi = std::min(b, grid.upper_edge(i));
    if (hi > lo) masses[i] = (hi - lo) / (b - a);
  }
  return MixedDensity::from_masses(grid, 0.0, masses);
}

double total_mass(const MixedDensity& d) {
  double s = d.atom0() + d.leaked();
  for (double v : d.density()) s += v * d.grid().delta();
  return s;
}

}  // namespace

TEST(Grid, Geometry) {
  const Grid g(8.0, 4);
  EXPECT_DOUBLE_EQ(g.delta(), 2.0);
  EXPECT_DOUBLE_EQ(g.center(0), 1.0);
  EXPECT_DOUBLE_EQ(g.center(3), 7.0);
  EXPECT_NEAR(g.delta() * g.size(), g.z_max(), 1e-12 * g.z_max());
  EXPECT_THROW(Grid(0.0, 4), DomainError);
  EXPECT_THROW(Grid(1.0, 1), DomainError);
}

TEST(Grid, CellsAreRightClosed) {
  const Grid g(4.0, 4);
  EXPECT_EQ(g.cell_of(0.5), 0u);
  EXPECT_EQ(g.cell_of(1.0), 0u);
  EXPECT_EQ(g.cell_of(1.0 + 1e-12), 1u);
  EXPECT_EQ(g.cell_of(4.0), 3u);
  EXPECT_THROW(g.cell_of(0.0), OutOfRangeError);
  EXPECT_THROW(g.cell_of(4.5), OutOfRangeError);
}

TEST(MixedDensity, RejectsBrokenInvariants) {
  const Grid g(2.0, 2);
  EXPECT_THROW(MixedDensity(g, 0.5, {0.1, 0.1}), DomainError);   // mass 0.7
  EXPECT_THROW(MixedDensity(g, 1.0, {0.0}), DomainError);        // wrong length
  EXPECT_THROW(MixedDensity(g, 0.0, {-0.5, 1.5}), DomainError);  // negative density
  EXPECT_NO_THROW(MixedDensity(g, 0.5, {0.25, 0.0}, 0.25));
}

TEST(Mean, Examples) {
  const Grid g(8.0, 4096);
  EXPECT_EQ(mean(MixedDensity::atom(g)), 0.0);
  EXPECT_NEAR(mean(discretize(PointMass(2.0), g)), 2.0, g.delta() / 2);
  const Grid u(8.0, 800);
  EXPECT_NEAR(mean(uniform_on(u, 0.0, 4.0)), 2.0, u.delta());
}

TEST(Cdf, Examples) {
  const Grid g(4.0, 400);
  std::vector<double> masses(g.size(), 0.5 / g.size());
  const auto half_atom = MixedDensity::from_masses(g, 0.5, masses);
  EXPECT_DOUBLE_EQ(cdf(half_atom, 0.0), 0.5);
  EXPECT_NEAR(cdf(uniform_on(g, 0.0, 1.0), 0.25), 0.25, g.delta());
  const MixedDensity leaky(g, 0.1, std::vector<double>(g.size(), 0.7 / 4.0), 0.2);
  EXPECT_NEAR(cdf(leaky, g.z_max()), 1.0 - leaky.leaked(), 1e-9);
  EXPECT_THROW(cdf(leaky, -1.0), DomainError);
}

TEST(Cdf, MonotoneAndStartsAtAtom) {
  const Grid g(10.0, 100);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> masses(g.size());
  for (auto& m : masses) m = u(rng) * 0.8 / g.size();
  const auto d = MixedDensity::from_masses(g, 0.05, masses);
  EXPECT_DOUBLE_EQ(cdf(d, 0.0), d.atom0());
  double previous = 0.0;
  for (double z = 0.0; z <= 10.0; z += 0.0371) {
    const double c = cdf(d, z);
    EXPECT_GE(c, previous);
    previous = c;
  }
}

TEST(KsDistance, Examples) {
  const Grid g(4.0, 400);
  const auto a = uniform_on(g, 0.0, 1.0);
  EXPECT_EQ(ks_distance(a, a), 0.0);
  EXPECT_NEAR(ks_distance(MixedDensity::atom(g), uniform_on(g, 2.0, 3.0)), 1.0, 1e-12);
  EXPECT_NEAR(ks_distance(a, uniform_on(g, 0.5, 1.5)), 0.5, g.delta());
  EXPECT_THROW(ks_distance(a, MixedDensity::atom(Grid(4.0, 200))), DomainError);
}

TEST(KsDistance, SymmetricAndTriangle) {
  const Grid g(6.0, 300);
  const auto a = uniform_on(g, 0.0, 2.0);
  const auto b = uniform_on(g, 1.0, 4.0);
  const auto c = discretize(PointMass(3.3), g);
  EXPECT_DOUBLE_EQ(ks_distance(a, b), ks_distance(b, a));
  EXPECT_LE(ks_distance(a, c), ks_distance(a, b) + ks_distance(b, c) + 1e-15);
  EXPECT_LE(ks_distance(b, c), ks_distance(b, a) + ks_distance(a, c) + 1e-15);
}

TEST(Discretize, Examples) {
  const Grid g(8.0, 4);
  const auto zero = discretize(PointMass(0.0), g);
  EXPECT_EQ(zero.atom0(), 1.0);
  const auto mid = discretize(PointMass(5.0), g);
  EXPECT_DOUBLE_EQ(mid.density()[2], 1.0 / g.delta());
  EXPECT_NEAR(total_mass(mid), 1.0, 1e-15);
  EXPECT_THROW(discretize(PointMass(9.0), g), OutOfRangeError);
  EXPECT_THROW(PointMass(-1.0), DomainError);
}

TEST(Discretize, MeanRoundTrip) {
  const Grid g(3.0, 64);
  for (double y = 0.013; y <= 3.0; y += 0.0517) {
    EXPECT_LE(std::abs(mean(discretize(PointMass(y), g)) - y), g.delta() / 2 + 1e-12);
  }
}

TEST(EmpiricalDensity, Examples) {
  const Grid g(2.0, 2);
  EXPECT_EQ(empirical_density(std::vector<double>{0, 0, 0, 0}, g).atom0(), 1.0);
  const auto ones = empirical_density(std::vector<double>{1, 1, 1, 1}, g);
  EXPECT_DOUBLE_EQ(ones.density()[0], 1.0);
  EXPECT_DOUBLE_EQ(ones.density()[1], 0.0);
  const auto split = empirical_density(std::vector<double>{0, 0.5, 1.5, 3.0}, g);
  EXPECT_DOUBLE_EQ(split.atom0(), 0.25);
  EXPECT_DOUBLE_EQ(split.leaked(), 0.25);
  EXPECT_THROW(empirical_density(std::vector<double>{}, g), DomainError);
  EXPECT_THROW(empirical_density(std::vector<double>{1.0, -0.1}, g), DomainError);
}

TEST(EmpiricalDensity, ChiSquaredSamplesMatchExactLaw) {
  const Grid g(12.0, 600);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  std::vector<double> samples(100'000);
  for (auto& s : samples) {
    const double h = normal(rng);
    s = h * h;
  }
  const boost::math::chi_squared_distribution<double> law(1);
  std::vector<double> masses(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    masses[i] = boost::math::cdf(law, g.upper_edge(i)) - boost::math::cdf(law, g.lower_edge(i));
  }
  const auto exact = MixedDensity::from_masses(g, 0.0, masses);
  EXPECT_LT(ks_distance(empirical_density(samples, g), exact), 0.01);
}

TEST(Moments, VarianceOfUniform) {
  const Grid g(4.0, 1000);
  EXPECT_NEAR(variance(uniform_on(g, 0.0, 4.0)), 16.0 / 12.0, 1e-3);
}

TEST(Distances, L1CountsEveryPart) {
  const Grid g(2.0, 2);
  const MixedDensity a(g, 0.5, {0.5, 0.0});
  const MixedDensity b(g, 0.0, {0.5, 0.0}, 0.5);
  EXPECT_NEAR(l1_distance(a, b), 1.0, 1e-15);
}

TEST(Csv, RoundTripIsExact) {
  const Grid g(7.3, 37);
  std::vector<double> masses(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) masses[i] = (1.0 + std::sin(double(i))) / 100.0;
  const auto d = MixedDensity::from_masses(g, 0.125, masses);
  std::stringstream buffer;
  write_csv(buffer, d);
  EXPECT_EQ(buffer.str().rfind("# atom0=", 0), 0u);
  EXPECT_NE(buffer.str().find("z,density"), std::string::npos);
  const auto back = read_csv(buffer);
  EXPECT_TRUE(back.grid() == g);
  EXPECT_EQ(back.atom0(), d.atom0());
  EXPECT_EQ(back.leaked(), d.leaked());
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(back.density()[i], d.density()[i]);
}

TEST(Csv, RejectsGarbage) {
  std::stringstream bad("z,density\n1,2\n");
  EXPECT_THROW(read_csv(bad), FormatError);
}
