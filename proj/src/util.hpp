#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "types.hpp"

namespace fxp {

/// Shortest decimal form that round-trips the exact double (via to_chars).
std::string format_double(double v);

std::string ascii_lower(std::string_view s);

std::string_view trim_left(std::string_view s);
std::string_view trim_right(std::string_view s);
std::string_view trim(std::string_view s);

/// Splits one CSV line into fields. Handles RFC-4180 style double-quoted
/// fields with "" escapes. Throws Error(parse) on an unterminated quote.
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a value for CSV output when it contains a comma, quote or newline.
std::string csv_field(std::string_view v);

std::string read_file(const std::filesystem::path& path);

/// Writes via a temp file in the same directory plus rename, so readers never
/// observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace fxp
