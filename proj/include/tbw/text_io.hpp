#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tbw {

// Whole-file helpers. Both throw ErrorCode::io on failure.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);
// Fixed-precision form for human-facing tables.
std::string format_fixed(double value, int digits);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split_whitespace(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace tbw
