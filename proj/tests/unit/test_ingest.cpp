#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <zlib.h>

#include "normprop/errors.hpp"
#include "normprop/ingest.hpp"

using namespace normprop;
namespace fs = std::filesystem;

namespace {

// Three 2x2 images written out byte by byte.
std::vector<std::uint8_t> fixture() {
  return {0x00, 0x00, 0x08, 0x03,  // magic
          0x00, 0x00, 0x00, 0x03,  // count
          0x00, 0x00, 0x00, 0x02,  // rows
          0x00, 0x00, 0x00, 0x02,  // cols
          0, 0, 0, 0,              // blank
          255, 0, 0, 0,            // one lit pixel
          255, 255, 255, 255};
}

std::vector<std::uint8_t> gzip(const std::vector<std::uint8_t>& raw) {
  z_stream stream{};
  EXPECT_EQ(deflateInit2(&stream, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 16 + MAX_WBITS, 8, Z_DEFAULT_STRATEGY), Z_OK);
  std::vector<std::uint8_t> out(deflateBound(&stream, raw.size()) + 32);
  stream.next_in = const_cast<Bytef*>(raw.data());
  stream.avail_in = static_cast<uInt>(raw.size());
  stream.next_out = out.data();
  stream.avail_out = static_cast<uInt>(out.size());
  EXPECT_EQ(deflate(&stream, Z_FINISH), Z_STREAM_END);
  out.resize(stream.total_out);
  deflateEnd(&stream);
  return out;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST(Idx, ParsesFixture) {
  const auto images = parse_idx(fixture());
  EXPECT_EQ(images.count, 3u);
  EXPECT_EQ(images.rows, 2u);
  EXPECT_EQ(images.cols, 2u);
  EXPECT_EQ(images.image(1)[0], 255);
  EXPECT_THROW(images.image(3), OutOfRangeError);
  const auto norms = squared_norms(images);
  EXPECT_EQ(norms, (std::vector<double>{0.0, 1.0, 4.0}));
  EXPECT_EQ(squared_norms(images, 127.5)[1], 4.0);
}

TEST(Idx, RejectsBadInput) {
  auto bytes = fixture();
  bytes.pop_back();
  EXPECT_THROW(parse_idx(bytes), TruncationError);
  const auto full = fixture();
  EXPECT_THROW(parse_idx(std::vector<std::uint8_t>(full.begin(), full.begin() + 10)), TruncationError);
  EXPECT_THROW(parse_idx(std::vector<std::uint8_t>{0, 0}), TruncationError);
  bytes = fixture();
  bytes[3] = 0x01;
  EXPECT_THROW(parse_idx(bytes), FormatError);
  bytes = fixture();
  bytes[11] = 0;
  EXPECT_THROW(parse_idx(bytes), FormatError);
  EXPECT_THROW(squared_norms(parse_idx(fixture()), 0.0), DomainError);
}

TEST(Idx, SerializeRoundTrip) {
  const auto images = parse_idx(fixture());
  EXPECT_EQ(serialize_idx(images), fixture());
}

TEST(Idx, LoadsPlainAndGzipFiles) {
  const auto plain = fs::temp_directory_path() / "normprop_fixture.idx";
  const auto packed = fs::temp_directory_path() / "normprop_fixture.idx.gz";
  write_bytes(plain, fixture());
  write_bytes(packed, gzip(fixture()));
  EXPECT_EQ(read_maybe_gzip(packed), fixture());
  EXPECT_EQ(load_idx(plain).pixels, load_idx(packed).pixels);

  auto broken = gzip(fixture());
  broken.resize(broken.size() / 2);
  write_bytes(packed, broken);
  EXPECT_THROW(load_idx(packed), Error);
  fs::remove(plain);
  fs::remove(packed);
  EXPECT_THROW(load_idx(plain), IoError);
}

TEST(Idx, SquaredNormDensity) {
  const Grid grid(2.0, 4);
  const auto d = squared_norm_density(parse_idx(fixture()), grid);
  EXPECT_NEAR(d.atom0(), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(d.leaked(), 1.0 / 3.0, 1e-15);
  // z = 1 sits on the upper edge of cell (0.5, 1].
  EXPECT_NEAR(d.density()[1] * grid.delta(), 1.0 / 3.0, 1e-15);
}

TEST(Idx, DefaultMeanSquaredNorm) {
  EXPECT_NEAR(kMnistMeanSquaredNorm, 784.0 * (0.1307 * 0.1307 + 0.3081 * 0.3081), 0.05);
}
