#include "ineqforge/json_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ineqforge/errors.hpp"
#include "ineqforge/numeric.hpp"

#ifndef INEQFORGE_VERSION
#define INEQFORGE_VERSION "0.0.0"
#endif

namespace ineqforge {

std::string_view library_version() noexcept { return INEQFORGE_VERSION; }

nlohmann::json real_to_json(double value) {
  if (std::isnan(value)) return nullptr;
  if (value == kInf) return "+inf";
  if (value == -kInf) return "-inf";
  return value;
}

double real_from_json(const nlohmann::json& value) {
  if (value.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (value.is_string()) {
    const auto text = value.get<std::string>();
    if (text == "+inf" || text == "inf") return kInf;
    if (text == "-inf") return -kInf;
    fail(ErrorCode::parse_error, "expected a number, got '" + text + "'");
  }
  if (!value.is_number()) fail(ErrorCode::parse_error, "expected a number");
  return value.get<double>();
}

std::string canonical_dump(const nlohmann::json& value) { return value.dump(2) + "\n"; }

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

nlohmann::json provenance_block(std::string_view config_hash) {
  return {{"tool", "ineqforge"},
          {"version", std::string(library_version())},
          {"config_hash", std::string(config_hash)}};
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::parse_error, "cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, "invalid JSON in '" + path.string() + "': " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::invalid_argument, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) fail(ErrorCode::invalid_argument, "write failed for '" + path.string() + "'");
}

}  // namespace ineqforge
