#pragma once

#include <cstddef>
#include <span>

#include "utiliconf/execution.hpp"
#include "utiliconf/utility.hpp"

namespace utiliconf {

// Kahan-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double y = x - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }
  void reset() { sum_ = compensation_ = 0.0; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

struct EmpiricalEstimate {
  double utility_mean = 0.0;         // capped empirical average utility
  double completion_fraction = 0.0;  // fraction of runs with t_ij < cap
  std::size_t m = 0;
  std::size_t completed = 0;
};

// Throws DomainError for an empty span or records with differing caps or algorithms.
EmpiricalEstimate empirical_stats(std::span<const RunRecord> records, const UtilityFunction& u);

// Incremental version of empirical_stats for one algorithm: append new
// records, or rebuild from scratch after the cap changed.
class EmpiricalAccumulator {
 public:
  void add(const RunRecord& rec, const UtilityFunction& u);
  void rebuild(std::span<const RunRecord> records, const UtilityFunction& u);
  EmpiricalEstimate estimate() const;

 private:
  CompensatedSum utility_sum_;
  std::size_t m_ = 0;
  std::size_t completed_ = 0;
};

// sqrt(ln(1/delta') / (2m)).
double hoeffding_radius(std::size_t m, double delta_prime);

// sqrt(ln(11 n m^2 (log2(cap) + 1)^2 / delta) / (2m)).
double up_alpha(std::size_t n, std::size_t m, double cap, double delta);

// sqrt(ln(4 n m^2 / delta) / (2m)), the successive-elimination radius.
double oracle_alpha(std::size_t n, std::size_t m, double delta);

// 3 sqrt(ln(11 n m^4 / delta) / (2m)).
double theoretical_epsilon(std::size_t n, std::size_t m, double delta);

// Per-algorithm state of one round. Bounds are deliberately not clamped to [0,1].
struct AlgorithmStats {
  std::size_t algorithm = 0;
  std::size_t m = 0;
  double cap = 0.0;
  double utility_mean = 0.0;
  double completion_fraction = 0.0;
  double alpha = 0.0;
  double ucb = 0.0;
  double lcb = 0.0;
};

struct ConfidenceBounds {
  double ucb = 0.0;
  double lcb = 0.0;
};

// UCB = U_hat + (1 - u(cap)) alpha;  LCB = U_hat - alpha - u(cap)(1 - F_hat).
ConfidenceBounds confidence_bounds(double utility_mean, double completion_fraction, double utility_at_cap,
                                   double alpha);
ConfidenceBounds confidence_bounds(const AlgorithmStats& stats, const UtilityFunction& u);

// max(0, max_i UCB_i - LCB_star) over the given candidates.
double anytime_epsilon(std::span<const AlgorithmStats> candidates, const AlgorithmStats& star);

// Wilson score interval for a binomial proportion.
struct ProportionInterval {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};
ProportionInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

}  // namespace utiliconf
