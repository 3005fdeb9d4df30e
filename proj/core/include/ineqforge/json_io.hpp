#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace ineqforge {

inline constexpr int kSchemaVersion = 1;

std::string_view library_version() noexcept;

/// JSON has no infinities: +inf and -inf are written as the strings "+inf"
/// and "-inf", NaN as null.
nlohmann::json real_to_json(double value);
double real_from_json(const nlohmann::json& value);

/// Canonical text: sorted keys, two-space indent, shortest round-trip floats,
/// trailing newline. Identical values always produce identical bytes.
std::string canonical_dump(const nlohmann::json& value);

/// 64-bit FNV-1a digest rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// {tool, version, config_hash} block attached to every artifact.
nlohmann::json provenance_block(std::string_view config_hash);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace ineqforge
