#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dip/io.hpp"

namespace dip::cli {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Runs one command line (without the program name). Exit status: 0 on
/// success, 1 on validation failure, 2 on usage errors or malformed input.
/// Diagnostics go to `err` as one JSON object per line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Companion manifest path for non-JSON outputs: "<path>.manifest.json".
std::filesystem::path manifest_path(const std::filesystem::path& output);

}  // namespace dip::cli
