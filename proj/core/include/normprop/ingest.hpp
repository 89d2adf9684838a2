#ifndef NORMPROP_INGEST_HPP_
#define NORMPROP_INGEST_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "normprop/distributions.hpp"

namespace normprop {

/// Mean squared norm of an MNIST training image with pixels scaled to [0, 1]:
/// 784 (mu^2 + s^2) for the dataset's pixel mean 0.1307 and std 0.3081. Used when no
/// IDX file is available.
inline constexpr double kMnistMeanSquaredNorm = 87.82;

/// Unsigned-byte rank-3 IDX tensor (count x rows x cols).
struct IdxImages {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;

  std::span<const std::uint8_t> image(std::size_t i) const;
};

IdxImages parse_idx(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_idx(const IdxImages& images);

/// Reads a file, inflating it first when it starts with the gzip magic.
std::vector<std::uint8_t> read_maybe_gzip(const std::filesystem::path& path);
IdxImages load_idx(const std::filesystem::path& path);

/// sum_p (pixel_p / scale)^2 per image.
std::vector<double> squared_norms(const IdxImages& images, double scale = 255.0);
MixedDensity squared_norm_density(const IdxImages& images, const Grid& grid, double scale = 255.0);

}  // namespace normprop

#endif  // NORMPROP_INGEST_HPP_
