#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace uner {

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// 64-bit FNV-1a; stable across platforms, used where a seedless
/// deterministic ordering is needed.
std::uint64_t fnv1a64(std::string_view data);

/// Current UTC time as ISO-8601 with a trailing Z.
std::string utc_timestamp();

}  // namespace uner
