#ifndef NORMPROP_REPORT_HPP_
#define NORMPROP_REPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace normprop {

std::string_view version() noexcept;

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// {"config_hash": <16 hex digits of FNV-1a over the compact config dump>, "version", "seed"}.
nlohmann::json provenance(const nlohmann::json& config, std::uint64_t seed);

/// Pretty-printed with a trailing newline; throws IoError.
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

}  // namespace normprop

#endif  // NORMPROP_REPORT_HPP_
