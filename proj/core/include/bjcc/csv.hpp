#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bjcc::csv {

// Shortest round-trip decimal representation ("." separator, locale-free).
std::string format_double(double v);

// Parse a full field as a double; throws ConfigError on trailing junk.
double parse_double(std::string_view field);

std::vector<std::string> split_line(std::string_view line, char sep = ',');

// Reads a headered CSV. The header must match `expected_header` exactly
// (after trimming a trailing '\r'); rows are returned as string fields.
std::vector<std::vector<std::string>> read_table(const std::filesystem::path& path,
                                                 const std::vector<std::string>& expected_header);

// Writes text to `path`, creating parent directories; throws ConfigError if
// the file cannot be written.
void write_text(const std::filesystem::path& path, const std::string& content);

} // namespace bjcc::csv
