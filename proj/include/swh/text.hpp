#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace swh {

// Shortest decimal that parses back to exactly the same double.
std::string format_double(double x);

// Fixed notation with the given number of decimals.
std::string format_fixed(double x, int decimals);

// Whole-string parse; nullopt on trailing garbage, empty input or overflow.
std::optional<double> parse_double(std::string_view s);

std::vector<std::string_view> split_fields(std::string_view line, char sep);

std::string_view trim(std::string_view s);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

// 16 lowercase hex digits.
std::string to_hex64(std::uint64_t v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace swh
