#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace utiliconf::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based file line of each row, for error messages.
  std::vector<std::size_t> line_numbers;
};

// Reads a comma-separated file with a mandatory header line. Blank lines are
// skipped, fields are whitespace-trimmed, quoting is not supported.
Table read(const std::filesystem::path& path);
Table parse(std::string_view text, const std::string& source_name = "<string>");

// Strict decimal parse: the whole field must be consumed. Throws FormatError
// naming `where` otherwise.
double parse_number(std::string_view field, const std::string& where);

// Shortest round-trippable representation, used for bit-stable output.
std::string format_number(double value);

}  // namespace utiliconf::csv
