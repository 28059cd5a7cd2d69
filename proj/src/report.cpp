#include "utiliconf/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "json.hpp"
#include "utiliconf/csv.hpp"
#include "utiliconf/errors.hpp"
#include "utiliconf/utility.hpp"

namespace utiliconf {
namespace {

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return csv::format_number(v);
        } else {
          return v;
        }
      },
      c);
}

std::string csv_field(const Cell& c) {
  std::string s = cell_text(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

nlohmann::ordered_json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return csv::format_number(v);
          return v;
        } else {
          return v;
        }
      },
      c);
}

std::optional<double> cell_number(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* k = std::get_if<std::uint64_t>(&c)) return static_cast<double>(*k);
  return std::nullopt;
}

std::string fixed(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::fixed, 2);
  if (ec != std::errc()) return "0";
  return std::string(buf, ptr);
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::size_t Report::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw DomainError("report has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  if (name == "svg") return ReportFormat::Svg;
  throw DomainError("unknown format '" + name + "' (expected csv, json or svg)");
}

std::string to_csv(const Report& report) {
  std::string out;
  for (std::size_t k = 0; k < report.columns.size(); ++k) {
    if (k) out += ',';
    out += report.columns[k];
  }
  out += '\n';
  for (const auto& row : report.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += csv_field(row[k]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Report& report) {
  nlohmann::ordered_json j;
  j["kind"] = report.kind;
  auto& meta = j["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.metadata) meta[key] = cell_json(value);
  j["columns"] = report.columns;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < row.size() && k < report.columns.size(); ++k) r[report.columns[k]] = cell_json(row[k]);
    rows.push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

std::string to_svg(const Report& report) {
  if (!report.chart) throw DomainError("report '" + report.kind + "' has no chart");
  const auto& chart = *report.chart;
  const std::size_t xc = report.column(chart.x);
  const std::size_t yc = report.column(chart.y);
  const std::size_t sc = report.column(chart.series);

  // series label -> x -> (sum, count)
  std::vector<std::string> order;
  std::map<std::string, std::map<double, std::pair<double, std::size_t>>> points;
  for (const auto& row : report.rows) {
    const auto x = cell_number(row[xc]);
    const auto y = cell_number(row[yc]);
    if (!x || !y || !(*y > 0.0) || !std::isfinite(*y) || (chart.log_x && !(*x > 0.0))) continue;
    const std::string label = chart.series + "=" + cell_text(row[sc]);
    if (!points.count(label)) order.push_back(label);
    auto& acc = points[label][*x];
    acc.first += *y;
    acc.second += 1;
  }

  const double width = 760, height = 460, left = 80, right = 200, top = 46, bottom = 64;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width) + "\" height=\"" + fixed(height) +
         "\" viewBox=\"0 0 " + fixed(width) + " " + fixed(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + fixed(width) + "\" height=\"" + fixed(height) + "\" fill=\"white\"/>\n";
  out += "<text x=\"" + fixed(width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         xml_escape(chart.title) + "</text>\n";

  double xmin = kInfinity, xmax = -kInfinity, ymin = kInfinity, ymax = -kInfinity;
  for (const auto& [label, series] : points) {
    for (const auto& [x, acc] : series) {
      const double y = acc.first / static_cast<double>(acc.second);
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (points.empty()) {
    out += "<text x=\"" + fixed(width / 2) + "\" y=\"" + fixed(height / 2) +
           "\" text-anchor=\"middle\">no data</text>\n</svg>\n";
    return out;
  }
  const auto fx = [&](double x) { return chart.log_x ? std::log10(x) : x; };
  double lx0 = fx(xmin), lx1 = fx(xmax);
  if (lx1 - lx0 < 1e-12) {
    lx0 -= chart.log_x ? 0.5 : 0.5 * std::max(1.0, std::abs(lx0));
    lx1 += chart.log_x ? 0.5 : 0.5 * std::max(1.0, std::abs(lx1));
  }
  double ly0 = std::floor(std::log10(ymin)), ly1 = std::ceil(std::log10(ymax));
  if (ly1 <= ly0) ly1 = ly0 + 1;
  const auto px = [&](double x) { return left + (fx(x) - lx0) / (lx1 - lx0) * plot_w; };
  const auto py = [&](double y) { return top + plot_h - (std::log10(y) - ly0) / (ly1 - ly0) * plot_h; };

  // axes and grid
  out += "<rect x=\"" + fixed(left) + "\" y=\"" + fixed(top) + "\" width=\"" + fixed(plot_w) + "\" height=\"" +
         fixed(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double d = ly0; d <= ly1 + 1e-9; d += 1.0) {
    const double y = top + plot_h - (d - ly0) / (ly1 - ly0) * plot_h;
    out += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(y) + "\" x2=\"" + fixed(left + plot_w) + "\" y2=\"" +
           fixed(y) + "\" stroke=\"#dddddd\"/>\n";
    out += "<text x=\"" + fixed(left - 6) + "\" y=\"" + fixed(y + 4) + "\" text-anchor=\"end\">1e" +
           std::to_string(static_cast<int>(d)) + "</text>\n";
  }
  std::vector<double> xticks;
  if (chart.log_x) {
    for (double d = std::ceil(lx0 - 1e-9); d <= lx1 + 1e-9; d += 1.0) xticks.push_back(std::pow(10.0, d));
    if (xticks.size() < 2) xticks = {xmin, xmax};
  } else {
    for (int k = 0; k <= 5; ++k) xticks.push_back(lx0 + (lx1 - lx0) * k / 5.0);
  }
  for (double x : xticks) {
    const double X = px(x);
    out += "<line x1=\"" + fixed(X) + "\" y1=\"" + fixed(top + plot_h) + "\" x2=\"" + fixed(X) + "\" y2=\"" +
           fixed(top + plot_h + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fixed(X) + "\" y=\"" + fixed(top + plot_h + 19) + "\" text-anchor=\"middle\">" +
           xml_escape(csv::format_number(std::round(x * 1e4) / 1e4)) + "</text>\n";
  }
  out += "<text x=\"" + fixed(left + plot_w / 2) + "\" y=\"" + fixed(height - 18) + "\" text-anchor=\"middle\">" +
         xml_escape(chart.x_label.empty() ? chart.x : chart.x_label) + "</text>\n";
  out += "<text x=\"18\" y=\"" + fixed(top + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         fixed(top + plot_h / 2) + ")\">" + xml_escape(chart.y_label.empty() ? chart.y : chart.y_label) +
         "</text>\n";

  for (std::size_t s = 0; s < order.size(); ++s) {
    const std::string colour = kPalette[s % std::size(kPalette)];
    std::string pts;
    for (const auto& [x, acc] : points[order[s]]) {
      const double y = acc.first / static_cast<double>(acc.second);
      if (!pts.empty()) pts += ' ';
      pts += fixed(px(x)) + "," + fixed(py(y));
      out += "<circle cx=\"" + fixed(px(x)) + "\" cy=\"" + fixed(py(y)) + "\" r=\"3\" fill=\"" + colour + "\"/>\n";
    }
    out += "<polyline fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    const double ly = top + 10 + 18.0 * static_cast<double>(s);
    out += "<line x1=\"" + fixed(left + plot_w + 12) + "\" y1=\"" + fixed(ly) + "\" x2=\"" +
           fixed(left + plot_w + 36) + "\" y2=\"" + fixed(ly) + "\" stroke=\"" + colour +
           "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fixed(left + plot_w + 42) + "\" y=\"" + fixed(ly + 4) + "\">" + xml_escape(order[s]) +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::vector<std::filesystem::path> emit_report(const Report& report, const std::filesystem::path& dir,
                                               const std::string& stem, const std::vector<ReportFormat>& formats) {
  if (report.rows.empty()) throw DomainError("refusing to emit an empty report");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (auto format : formats) {
    std::string body, ext;
    switch (format) {
      case ReportFormat::Csv:
        body = to_csv(report);
        ext = ".csv";
        break;
      case ReportFormat::Json:
        body = to_json(report);
        ext = ".json";
        break;
      case ReportFormat::Svg:
        if (!report.chart) continue;
        body = to_svg(report);
        ext = ".svg";
        break;
    }
    const auto path = dir / (stem + ext);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
    out.close();
    if (!out) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace utiliconf
