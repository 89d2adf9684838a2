#include "normprop/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "normprop/errors.hpp"

namespace normprop {

namespace {

double sum(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

void require_same_grid(const MixedDensity& a, const MixedDensity& b) {
  if (!(a.grid() == b.grid())) {
    throw DomainError("distributions on different grids");
  }
}

// CDF at the upper edge of every cell, i.e. cumulative[i] = P(Z <= (i+1) delta).
std::vector<double> cumulative_at_edges(const MixedDensity& d) {
  const auto density = d.density();
  std::vector<double> out(density.size());
  double acc = d.atom0();
  const double delta = d.grid().delta();
  for (std::size_t i = 0; i < density.size(); ++i) {
    acc += density[i] * delta;
    out[i] = acc;
  }
  return out;
}

}  // namespace

Grid::Grid(double z_max, std::size_t n_points) : z_max_(z_max), n_(n_points), delta_(0.0) {
  if (!(z_max > 0.0) || !std::isfinite(z_max)) {
    throw DomainError("grid z_max must be positive and finite");
  }
  if (n_points < 2) {
    throw DomainError("grid needs at least 2 cells");
  }
  delta_ = z_max / static_cast<double>(n_points);
}

std::size_t Grid::cell_of(double z) const {
  if (!(z > 0.0) || z > z_max_ * (1.0 + 1e-12)) {
    throw OutOfRangeError("value " + std::to_string(z) + " outside (0, z_max]");
  }
  const double idx = std::ceil(z / delta_) - 1.0;
  return static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(n_ - 1)));
}

bool operator==(const Grid& a, const Grid& b) noexcept {
  return a.n_ == b.n_ && std::abs(a.z_max_ - b.z_max_) <= 1e-12 * std::max(a.z_max_, b.z_max_);
}

MixedDensity::MixedDensity(Grid grid, double atom0, std::vector<double> density, double leaked)
    : grid_(grid), atom0_(atom0), density_(std::move(density)), leaked_(leaked) {
  if (density_.size() != grid_.size()) {
    throw DomainError("density length does not match grid size");
  }
  if (!(atom0_ >= 0.0 && atom0_ <= 1.0 + kMassTolerance)) {
    throw DomainError("atom0 outside [0, 1]");
  }
  if (!(leaked_ >= 0.0)) {
    throw DomainError("leaked mass must be nonnegative");
  }
  for (double v : density_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DomainError("density values must be finite and nonnegative");
    }
  }
  const double total = grid_mass() + leaked_;
  if (std::abs(total - 1.0) > kMassTolerance) {
    std::ostringstream msg;
    msg << std::setprecision(17) << "total mass " << total << " differs from 1";
    throw DomainError(msg.str());
  }
}

MixedDensity MixedDensity::atom(const Grid& grid) {
  return MixedDensity(grid, 1.0, std::vector<double>(grid.size(), 0.0), 0.0);
}

MixedDensity MixedDensity::from_masses(const Grid& grid, double atom0, std::span<const double> cell_masses) {
  if (cell_masses.size() != grid.size()) {
    throw DomainError("cell mass count does not match grid size");
  }
  std::vector<double> density(cell_masses.size());
  const double inv_delta = 1.0 / grid.delta();
  double held = atom0;
  for (std::size_t i = 0; i < cell_masses.size(); ++i) {
    double m = cell_masses[i];
    if (m < 0.0 && m >= -1e-12) m = 0.0;
    density[i] = m * inv_delta;
    held += m;
  }
  double leaked = 1.0 - held;
  if (leaked < 0.0 && leaked >= -kMassTolerance) leaked = 0.0;
  return MixedDensity(grid, atom0, std::move(density), leaked);
}

double MixedDensity::grid_mass() const noexcept { return atom0_ + grid_.delta() * sum(density_); }

PointMass::PointMass(double loc) : location(loc) {
  if (!(loc >= 0.0) || !std::isfinite(loc)) {
    throw DomainError("point mass location must be finite and nonnegative");
  }
}

double mean(const MixedDensity& d) {
  const auto density = d.density();
  const Grid& g = d.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) acc += g.center(i) * density[i];
  return acc * g.delta();
}

double second_moment(const MixedDensity& d) {
  const auto density = d.density();
  const Grid& g = d.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) {
    // Exact second moment of a uniform cell: c^2 + delta^2 / 12.
    acc += (g.center(i) * g.center(i) + g.delta() * g.delta() / 12.0) * density[i];
  }
  return acc * g.delta();
}

double variance(const MixedDensity& d) {
  // Conditional on staying on the grid.
  const double mass = d.grid_mass();
  if (mass <= 0.0) return 0.0;
  const double m1 = mean(d) / mass;
  return std::max(0.0, second_moment(d) / mass - m1 * m1);
}

double cdf(const MixedDensity& d, double z) {
  if (z < 0.0 || std::isnan(z)) {
    throw DomainError("cdf evaluated at negative z");
  }
  const Grid& g = d.grid();
  if (z >= g.z_max()) return d.grid_mass();
  const auto density = d.density();
  const double position = z / g.delta();
  const auto full = static_cast<std::size_t>(std::floor(position));
  double acc = d.atom0();
  for (std::size_t i = 0; i < full; ++i) acc += density[i] * g.delta();
  if (full < density.size()) acc += density[full] * (z - g.lower_edge(full));
  return std::min(acc, 1.0);
}

double ks_distance(const MixedDensity& a, const MixedDensity& b) {
  require_same_grid(a, b);
  const auto ca = cumulative_at_edges(a);
  const auto cb = cumulative_at_edges(b);
  double worst = std::abs(a.atom0() - b.atom0());
  for (std::size_t i = 0; i < ca.size(); ++i) worst = std::max(worst, std::abs(ca[i] - cb[i]));
  return std::min(worst, 1.0);
}

double l1_distance(const MixedDensity& a, const MixedDensity& b) {
  require_same_grid(a, b);
  const auto da = a.density();
  const auto db = b.density();
  double acc = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) acc += std::abs(da[i] - db[i]);
  return std::abs(a.atom0() - b.atom0()) + acc * a.grid().delta() + std::abs(a.leaked() - b.leaked());
}

MixedDensity discretize(const PointMass& p, const Grid& grid) {
  if (p.location > grid.z_max() * (1.0 + 1e-12)) {
    throw OutOfRangeError("point mass at " + std::to_string(p.location) + " beyond z_max");
  }
  if (p.location == 0.0) return MixedDensity::atom(grid);
  std::vector<double> density(grid.size(), 0.0);
  density[grid.cell_of(p.location)] = 1.0 / grid.delta();
  return MixedDensity(grid, 0.0, std::move(density), 0.0);
}

MixedDensity empirical_density(std::span<const double> samples, const Grid& grid) {
  if (samples.empty()) {
    throw DomainError("empirical density of an empty sample");
  }
  std::vector<double> counts(grid.size(), 0.0);
  std::size_t zeros = 0;
  std::size_t beyond = 0;
  for (double s : samples) {
    if (!(s >= 0.0)) throw DomainError("negative or NaN sample");
    if (s == 0.0) {
      ++zeros;
    } else if (s > grid.z_max()) {
      ++beyond;
    } else {
      counts[grid.cell_of(s)] += 1.0;
    }
  }
  const double n = static_cast<double>(samples.size());
  const double scale = 1.0 / (n * grid.delta());
  for (double& c : counts) c *= scale;
  const double atom0 = static_cast<double>(zeros) / n;
  const double leaked = static_cast<double>(beyond) / n;
  return MixedDensity(grid, atom0, std::move(counts), leaked);
}

void write_csv(std::ostream& out, const MixedDensity& d) {
  const auto old_precision = out.precision(17);
  out << "# atom0=" << d.atom0() << " leaked=" << d.leaked() << '\n';
  out << "z,density\n";
  const auto density = d.density();
  for (std::size_t i = 0; i < density.size(); ++i) {
    out << d.grid().center(i) << ',' << density[i] << '\n';
  }
  out.precision(old_precision);
}

MixedDensity read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# atom0=", 0) != 0) {
    throw FormatError("expected '# atom0=<v> leaked=<v>' comment line");
  }
  double atom0 = 0.0;
  double leaked = 0.0;
  {
    const auto leak_pos = line.find(" leaked=");
    if (leak_pos == std::string::npos) throw FormatError("missing leaked= field");
    try {
      atom0 = std::stod(line.substr(8, leak_pos - 8));
      leaked = std::stod(line.substr(leak_pos + 8));
    } catch (const std::exception&) {
      throw FormatError("unparsable atom0/leaked values");
    }
  }
  if (!std::getline(in, line) || line != "z,density") {
    throw FormatError("expected 'z,density' header");
  }
  std::vector<double> z;
  std::vector<double> density;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError("malformed row: " + line);
    try {
      z.push_back(std::stod(line.substr(0, comma)));
      density.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw FormatError("malformed row: " + line);
    }
  }
  if (z.size() < 2) throw FormatError("need at least two rows");
  const double delta = (z.back() - z.front()) / static_cast<double>(z.size() - 1);
  Grid grid(delta * static_cast<double>(z.size()), z.size());
  return MixedDensity(grid, atom0, std::move(density), leaked);
}

}  // namespace normprop
