#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace utiliconf {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Log-Laplace utility: one minus the log-Laplace CDF with median `scale`.
//   u(t) = 1 - 0.5 (t/scale)^(1/shape)   for t <= scale
//   u(t) = 0.5 (scale/t)^(1/shape)       for t >  scale
// shape = 1 gives the familiar 1 - t/(2 t0) / (t0/2t) pair. u never reaches 0.
struct LogLaplaceUtility {
  double scale = 60.0;
  double shape = 1.0;
};

// u(t) = 1 - t/horizon for t < horizon, 0 afterwards.
struct UniformUtility {
  double horizon = 60.0;
};

// Linear interpolation through (time, utility) breakpoints. u(t) = 1 before
// the first breakpoint and 0 strictly after the last one.
struct TableUtility {
  std::vector<std::pair<double, double>> breakpoints;
};

// Bounded, non-increasing map from runtime (seconds) to [0,1] with u(0) = 1.
// Immutable once constructed.
class UtilityFunction {
 public:
  using Form = std::variant<LogLaplaceUtility, UniformUtility, TableUtility>;

  static UtilityFunction log_laplace(double scale, double shape = 1.0);
  static UtilityFunction uniform(double horizon);
  static UtilityFunction table(std::vector<std::pair<double, double>> breakpoints);

  // Parses `loglaplace:<t0>,<sigma>`, `uniform:<t0>` or `table:<path.csv>`.
  static UtilityFunction parse(const std::string& spec);
  static UtilityFunction load_table(const std::filesystem::path& path);

  // Throws DomainError for negative or non-finite t.
  double operator()(double t) const;
  double eval(double t) const { return (*this)(t); }

  // inf{t : u(t) <= x}. Returns kInfinity when u never gets down to x
  // (only x = 0 on a log-Laplace utility).
  double inverse(double x) const;

  // Runtimes where u is not smooth; quadrature splits there.
  std::vector<double> kinks() const;

  const Form& form() const { return form_; }
  std::string describe() const;

 private:
  explicit UtilityFunction(Form form) : form_(std::move(form)) {}
  Form form_;
};

}  // namespace utiliconf
