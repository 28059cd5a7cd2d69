#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace utiliconf {

// A missing value (infeasible pair, target not reached) is monostate; it is an
// empty CSV field and null in JSON.
using Cell = std::variant<std::monostate, bool, std::uint64_t, double, std::string>;

struct ChartSpec {
  std::string title;
  std::string x;       // column plotted horizontally
  std::string y;       // column plotted vertically, log scale
  std::string series;  // column whose distinct values become lines
  bool log_x = false;
  std::string x_label;
  std::string y_label;
};

// Rectangular result table plus run metadata. Rows keep insertion order.
struct Report {
  std::string kind;
  std::vector<std::pair<std::string, Cell>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::optional<ChartSpec> chart;

  std::size_t column(const std::string& name) const;  // throws DomainError if absent
};

enum class ReportFormat { Csv, Json, Svg };

ReportFormat parse_report_format(const std::string& name);

std::string to_csv(const Report& report);
std::string to_json(const Report& report);
// Mean of y over rows sharing (series, x); rows with a missing y are skipped.
std::string to_svg(const Report& report);

// Writes <dir>/<stem>.<ext> for each format and returns the paths. SVG needs a
// chart; without one it is skipped. Throws std::runtime_error on I/O failure.
std::vector<std::filesystem::path> emit_report(const Report& report, const std::filesystem::path& dir,
                                               const std::string& stem, const std::vector<ReportFormat>& formats);

}  // namespace utiliconf
