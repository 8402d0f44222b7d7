#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vitprobe {

// Small helpers shared by the CSV and key=value readers.

// Splits text into lines, stripping a trailing '\r' from each.
std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');
std::string_view trim(std::string_view s);

// Strict numeric parsing: the whole field must be consumed.
bool parse_int(std::string_view s, std::int64_t& out);
bool parse_uint(std::string_view s, std::uint64_t& out);
bool parse_double(std::string_view s, double& out);

// Shortest representation that round-trips.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);
std::vector<std::byte> read_binary_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
void write_binary_file(const std::filesystem::path& path, const std::vector<std::byte>& bytes);

}  // namespace vitprobe
