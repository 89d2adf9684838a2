#include "normprop/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "normprop/errors.hpp"

#ifndef NORMPROP_VERSION
#define NORMPROP_VERSION "0.0.0"
#endif

namespace normprop {

std::string_view version() noexcept { return NORMPROP_VERSION; }

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

nlohmann::json provenance(const nlohmann::json& config, std::uint64_t seed) {
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(config.dump());
  return {{"config_hash", hex.str()}, {"version", std::string(version())}, {"seed", seed}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << value.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace normprop
