#include "utiliconf/utility.hpp"

#include <cmath>
#include <sstream>

#include "utiliconf/csv.hpp"
#include "utiliconf/errors.hpp"

namespace utiliconf {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double eval_table(const TableUtility& tab, double t) {
  const auto& bp = tab.breakpoints;
  if (t <= bp.front().first) return bp.front().second;
  if (t > bp.back().first) return 0.0;
  for (std::size_t k = 1; k < bp.size(); ++k) {
    const auto [t1, u1] = bp[k];
    if (t <= t1) {
      const auto [t0, u0] = bp[k - 1];
      if (t == t1) return u1;
      return u0 + (u1 - u0) * (t - t0) / (t1 - t0);
    }
  }
  return bp.back().second;
}

double inverse_table(const TableUtility& tab, double x) {
  const auto& bp = tab.breakpoints;
  for (std::size_t k = 1; k < bp.size(); ++k) {
    const auto [t1, u1] = bp[k];
    if (u1 <= x) {
      const auto [t0, u0] = bp[k - 1];
      if (u0 <= x) return t0;
      return t0 + (u0 - x) / (u0 - u1) * (t1 - t0);
    }
  }
  // Utility drops to 0 right after the last breakpoint.
  return bp.back().first;
}

}  // namespace

UtilityFunction UtilityFunction::log_laplace(double scale, double shape) {
  if (!(scale > 0.0) || !std::isfinite(scale) || !(shape > 0.0) || !std::isfinite(shape)) {
    throw DomainError("loglaplace utility needs positive finite scale and shape");
  }
  return UtilityFunction(LogLaplaceUtility{scale, shape});
}

UtilityFunction UtilityFunction::uniform(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("uniform utility needs a positive finite horizon");
  }
  return UtilityFunction(UniformUtility{horizon});
}

UtilityFunction UtilityFunction::table(std::vector<std::pair<double, double>> breakpoints) {
  if (breakpoints.empty()) throw DomainError("utility table has no breakpoints");
  if (breakpoints.front().second != 1.0) {
    throw DomainError("utility table must start at utility 1");
  }
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    const auto [t, v] = breakpoints[k];
    if (!std::isfinite(t) || t < 0.0) throw DomainError("utility table times must be finite and >= 0");
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("utility table values must lie in [0,1]");
    if (k > 0) {
      if (!(t > breakpoints[k - 1].first)) {
        throw DomainError("utility table times must be strictly ascending");
      }
      if (v > breakpoints[k - 1].second) {
        throw DomainError("utility table values must be non-increasing");
      }
    }
  }
  return UtilityFunction(TableUtility{std::move(breakpoints)});
}

UtilityFunction UtilityFunction::load_table(const std::filesystem::path& path) {
  const auto parsed = csv::read(path);
  if (parsed.header.size() != 2 || parsed.header[0] != "t" || parsed.header[1] != "u") {
    throw FormatError(path.string() + ": utility table header must be 't,u'");
  }
  std::vector<std::pair<double, double>> points;
  for (std::size_t r = 0; r < parsed.rows.size(); ++r) {
    const auto& row = parsed.rows[r];
    const std::string where = path.string() + ":" + std::to_string(parsed.line_numbers[r]);
    if (row.size() != 2) throw FormatError(where + ": expected 2 columns");
    points.emplace_back(csv::parse_number(row[0], where + " column t"),
                        csv::parse_number(row[1], where + " column u"));
  }
  try {
    return table(std::move(points));
  } catch (const DomainError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

UtilityFunction UtilityFunction::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw DomainError("bad utility spec '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  const std::string args = spec.substr(colon + 1);
  if (kind == "table") return load_table(args);
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= args.size()) {
    const auto comma = args.find(',', start);
    const auto field = args.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      values.push_back(csv::parse_number(field, "utility spec '" + spec + "'"));
    } catch (const FormatError& e) {
      throw DomainError(e.what());
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (kind == "loglaplace") {
    if (values.size() == 1) return log_laplace(values[0]);
    if (values.size() == 2) return log_laplace(values[0], values[1]);
  } else if (kind == "uniform") {
    if (values.size() == 1) return uniform(values[0]);
  }
  throw DomainError("bad utility spec '" + spec + "'");
}

double UtilityFunction::operator()(double t) const {
  if (!std::isfinite(t) || t < 0.0) {
    throw DomainError("utility evaluated at invalid runtime " + std::to_string(t));
  }
  return std::visit(
      overloaded{
          [t](const LogLaplaceUtility& ll) {
            if (t <= ll.scale) return 1.0 - 0.5 * std::pow(t / ll.scale, 1.0 / ll.shape);
            return 0.5 * std::pow(ll.scale / t, 1.0 / ll.shape);
          },
          [t](const UniformUtility& un) { return t < un.horizon ? 1.0 - t / un.horizon : 0.0; },
          [t](const TableUtility& tab) { return eval_table(tab, t); },
      },
      form_);
}

double UtilityFunction::inverse(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("utility inverse needs x in [0,1], got " + std::to_string(x));
  }
  if (x == 1.0) return 0.0;
  return std::visit(
      overloaded{
          [x](const LogLaplaceUtility& ll) {
            if (x == 0.0) return kInfinity;
            if (x >= 0.5) return ll.scale * std::pow(2.0 * (1.0 - x), ll.shape);
            return ll.scale * std::pow(2.0 * x, -ll.shape);
          },
          [x](const UniformUtility& un) { return un.horizon * (1.0 - x); },
          [x](const TableUtility& tab) { return inverse_table(tab, x); },
      },
      form_);
}

std::vector<double> UtilityFunction::kinks() const {
  return std::visit(overloaded{
                        [](const LogLaplaceUtility& ll) { return std::vector<double>{ll.scale}; },
                        [](const UniformUtility& un) { return std::vector<double>{un.horizon}; },
                        [](const TableUtility& tab) {
                          std::vector<double> out;
                          for (const auto& [t, v] : tab.breakpoints) out.push_back(t);
                          return out;
                        },
                    },
                    form_);
}

std::string UtilityFunction::describe() const {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const LogLaplaceUtility& ll) {
                   out << "loglaplace:" << csv::format_number(ll.scale) << ','
                       << csv::format_number(ll.shape);
                 },
                 [&](const UniformUtility& un) { out << "uniform:" << csv::format_number(un.horizon); },
                 [&](const TableUtility& tab) { out << "table(" << tab.breakpoints.size() << " points)"; },
             },
             form_);
  return out.str();
}

}  // namespace utiliconf
