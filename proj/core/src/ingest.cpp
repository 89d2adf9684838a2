#include "normprop/ingest.hpp"

#include <array>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>
#include <string>

#include <zlib.h>

#include "normprop/errors.hpp"

namespace normprop {

namespace {

constexpr std::uint32_t kUbyteRank3Magic = 0x00000803;
constexpr std::size_t kHeaderBytes = 16;

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void append_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
}

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& compressed, const std::string& name) {
  z_stream stream{};
  if (inflateInit2(&stream, 16 + MAX_WBITS) != Z_OK) throw IoError("zlib init failed");
  stream.next_in = const_cast<Bytef*>(compressed.data());
  stream.avail_in = static_cast<uInt>(compressed.size());
  std::vector<std::uint8_t> out;
  std::array<std::uint8_t, 1 << 16> chunk{};
  int status = Z_OK;
  while (status != Z_STREAM_END) {
    stream.next_out = chunk.data();
    stream.avail_out = static_cast<uInt>(chunk.size());
    status = inflate(&stream, Z_NO_FLUSH);
    if (status != Z_OK && status != Z_STREAM_END) {
      inflateEnd(&stream);
      throw FormatError("corrupt gzip stream in " + name);
    }
    out.insert(out.end(), chunk.data(), chunk.data() + (chunk.size() - stream.avail_out));
    if (status == Z_OK && stream.avail_in == 0 && stream.avail_out != 0) {
      inflateEnd(&stream);
      throw TruncationError("gzip stream ends early in " + name);
    }
  }
  inflateEnd(&stream);
  return out;
}

}  // namespace

std::span<const std::uint8_t> IdxImages::image(std::size_t i) const {
  if (i >= count) throw OutOfRangeError("image index out of range");
  return std::span<const std::uint8_t>(pixels).subspan(i * rows * cols, rows * cols);
}

IdxImages parse_idx(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw TruncationError("IDX data shorter than its magic number");
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kUbyteRank3Magic) {
    std::ostringstream msg;
    msg << "IDX magic 0x" << std::hex << std::setw(8) << std::setfill('0') << magic
        << " is not an unsigned-byte rank-3 tensor (0x00000803)";
    throw FormatError(msg.str());
  }
  if (bytes.size() < kHeaderBytes) throw TruncationError("IDX header is truncated");
  IdxImages images;
  images.count = read_be32(bytes, 4);
  images.rows = read_be32(bytes, 8);
  images.cols = read_be32(bytes, 12);
  if (images.rows == 0 || images.cols == 0) throw FormatError("IDX image dimensions must be positive");
  const std::size_t expected = images.count * images.rows * images.cols;
  const std::size_t payload = bytes.size() - kHeaderBytes;
  if (payload != expected) {
    throw TruncationError("IDX payload holds " + std::to_string(payload) + " bytes, header declares " +
                          std::to_string(expected));
  }
  images.pixels.assign(bytes.begin() + kHeaderBytes, bytes.end());
  return images;
}

std::vector<std::uint8_t> serialize_idx(const IdxImages& images) {
  if (images.pixels.size() != images.count * images.rows * images.cols) {
    throw DomainError("pixel buffer does not match declared dimensions");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + images.pixels.size());
  append_be32(out, kUbyteRank3Magic);
  append_be32(out, static_cast<std::uint32_t>(images.count));
  append_be32(out, static_cast<std::uint32_t>(images.rows));
  append_be32(out, static_cast<std::uint32_t>(images.cols));
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<std::uint8_t> read_maybe_gzip(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) return gunzip(bytes, path.string());
  return bytes;
}

IdxImages load_idx(const std::filesystem::path& path) { return parse_idx(read_maybe_gzip(path)); }

std::vector<double> squared_norms(const IdxImages& images, double scale) {
  if (!(scale > 0.0)) throw DomainError("pixel scale must be positive");
  std::array<double, 256> table{};
  for (std::size_t v = 0; v < table.size(); ++v) table[v] = (v / scale) * (v / scale);
  std::vector<double> norms(images.count);
  for (std::size_t i = 0; i < images.count; ++i) {
    double acc = 0.0;
    for (std::uint8_t p : images.image(i)) acc += table[p];
    norms[i] = acc;
  }
  return norms;
}

MixedDensity squared_norm_density(const IdxImages& images, const Grid& grid, double scale) {
  return empirical_density(squared_norms(images, scale), grid);
}

}  // namespace normprop
