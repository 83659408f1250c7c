#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pcekit::csv {

/// 17 significant digits, '.' separator, independent of the global locale.
std::string format_double(double value);

/// Shortest representation that round-trips; used for labels.
std::string format_shortest(double value);

/// Parses a full field as a double; throws std::invalid_argument naming
/// `context` on malformed input.
double parse_double(std::string_view field, std::string_view context);

std::vector<std::string> split_line(std::string_view line);

std::string join(const std::vector<std::string>& fields);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace pcekit::csv
