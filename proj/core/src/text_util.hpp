#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace softqos::detail {

bool iequals(std::string_view a, std::string_view b) noexcept;
std::string to_lower(std::string_view s);
std::size_t edit_distance(std::string_view a, std::string_view b);

/// Shortest text that parses back to the same double.
std::string format_double(double value);
/// Strict parse of a whole field; throws ValidationError.
double parse_double(std::string_view text, std::string_view what);
std::uint64_t parse_uint(std::string_view text, std::string_view what);

/// Throws IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace softqos::detail
