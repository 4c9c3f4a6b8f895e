#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sitgrid {

/// Shortest decimal string that round-trips back to the exact double.
std::string format_double(double v);

/// Strict full-token parses; throw ParseError with the offending token.
double parse_double(std::string_view token);
long parse_long(std::string_view token);

/// Splits one CSV line on commas. No quoting: the canonical schemas never
/// embed separators in values.
std::vector<std::string> split_csv_line(std::string_view line);

std::string join_csv(const std::vector<std::string>& fields);

/// Reads a whole file; throws IoError when unreadable.
std::string read_text_file(const std::string& path);

/// Writes atomically-ish (truncate + write); throws IoError on failure.
void write_text_file(const std::string& path, std::string_view content);

}  // namespace sitgrid
