#ifndef NORMPROP_DISTRIBUTIONS_HPP_
#define NORMPROP_DISTRIBUTIONS_HPP_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace normprop {

/// Equidistant partition of (0, z_max] into n cells of width delta.
///
/// Cell i is the half-open interval (i*delta, (i+1)*delta]; the point z = 0
/// belongs to no cell and is represented by a separate atom (see MixedDensity).
class Grid {
 public:
  Grid(double z_max, std::size_t n_points);

  double z_max() const noexcept { return z_max_; }
  std::size_t size() const noexcept { return n_; }
  double delta() const noexcept { return delta_; }

  double center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * delta_; }
  double lower_edge(std::size_t i) const noexcept { return static_cast<double>(i) * delta_; }
  double upper_edge(std::size_t i) const noexcept { return static_cast<double>(i + 1) * delta_; }

  /// Index of the cell containing z, for z in (0, z_max].
  std::size_t cell_of(double z) const;

  /// Same cell count and z_max equal within 1e-12 relative (survives CSV round trips).
  friend bool operator==(const Grid& a, const Grid& b) noexcept;

 private:
  double z_max_;
  std::size_t n_;
  double delta_;
};

/// Probability measure on [0, inf): an atom at zero, a piecewise-constant
/// density on the grid cells, and the mass that left the grid (z > z_max).
///
/// Invariant: atom0 + delta * sum(density) + leaked == 1 within 1e-9.
class MixedDensity {
 public:
  static constexpr double kMassTolerance = 1e-9;

  MixedDensity(Grid grid, double atom0, std::vector<double> density, double leaked = 0.0);

  /// All mass at z = 0.
  static MixedDensity atom(const Grid& grid);

  /// Builds a density from per-cell masses; whatever is missing from unit mass
  /// is booked as leaked. Round-off negatives (|x| <= 1e-12) are clamped to 0.
  static MixedDensity from_masses(const Grid& grid, double atom0, std::span<const double> cell_masses);

  const Grid& grid() const noexcept { return grid_; }
  double atom0() const noexcept { return atom0_; }
  std::span<const double> density() const noexcept { return density_; }
  double leaked() const noexcept { return leaked_; }

  /// Mass held on [0, z_max]: atom plus cells.
  double grid_mass() const noexcept;

 private:
  Grid grid_;
  double atom0_;
  std::vector<double> density_;
  double leaked_;
};

struct PointMass {
  explicit PointMass(double location);
  double location;
};

double mean(const MixedDensity& d);
double second_moment(const MixedDensity& d);
double variance(const MixedDensity& d);

/// P(Z <= z), integrating the partial cell linearly. Mass beyond z_max is
/// never counted, so cdf(z) tops out at 1 - leaked.
double cdf(const MixedDensity& d, double z);

/// Kolmogorov-Smirnov distance evaluated at z = 0 and every cell edge.
double ks_distance(const MixedDensity& a, const MixedDensity& b);

/// Total-variation style L1 distance: |atom diff| + integral |density diff| + |leak diff|.
double l1_distance(const MixedDensity& a, const MixedDensity& b);

MixedDensity discretize(const PointMass& p, const Grid& grid);

/// Histogram of samples: exact zeros go to the atom, samples above z_max to leaked.
MixedDensity empirical_density(std::span<const double> samples, const Grid& grid);

/// `# atom0=<v> leaked=<v>` followed by a `z,density` table at cell centers.
void write_csv(std::ostream& out, const MixedDensity& d);
MixedDensity read_csv(std::istream& in);

}  // namespace normprop

#endif  // NORMPROP_DISTRIBUTIONS_HPP_
