#include "utiliconf/stats.hpp"

#include <algorithm>
#include <cmath>

#include "utiliconf/errors.hpp"

namespace utiliconf {
namespace {

void require_delta(double delta, const char* what) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError(std::string(what) + " needs delta in (0,1), got " + std::to_string(delta));
  }
}

void require_count(std::size_t m, const char* what) {
  if (m == 0) throw DomainError(std::string(what) + " needs at least one sample");
}

}  // namespace

EmpiricalEstimate empirical_stats(std::span<const RunRecord> records, const UtilityFunction& u) {
  if (records.empty()) throw DomainError("empirical_stats needs at least one record");
  const double cap = records.front().cap;
  const std::size_t algorithm = records.front().algorithm;
  EmpiricalAccumulator acc;
  for (const auto& rec : records) {
    if (rec.cap != cap) throw DomainError("empirical_stats: records at different captimes");
    if (rec.algorithm != algorithm) throw DomainError("empirical_stats: records of different algorithms");
    acc.add(rec, u);
  }
  return acc.estimate();
}

void EmpiricalAccumulator::add(const RunRecord& rec, const UtilityFunction& u) {
  utility_sum_.add(u(rec.observed));
  ++m_;
  if (rec.completed) ++completed_;
}

void EmpiricalAccumulator::rebuild(std::span<const RunRecord> records, const UtilityFunction& u) {
  utility_sum_.reset();
  m_ = 0;
  completed_ = 0;
  for (const auto& rec : records) add(rec, u);
}

EmpiricalEstimate EmpiricalAccumulator::estimate() const {
  EmpiricalEstimate e;
  e.m = m_;
  e.completed = completed_;
  if (m_ > 0) {
    e.utility_mean = utility_sum_.value() / static_cast<double>(m_);
    e.completion_fraction = static_cast<double>(completed_) / static_cast<double>(m_);
  }
  return e;
}

double hoeffding_radius(std::size_t m, double delta_prime) {
  require_count(m, "hoeffding_radius");
  if (!(delta_prime > 0.0 && delta_prime <= 1.0)) {
    throw DomainError("hoeffding_radius needs delta' in (0,1]");
  }
  return std::sqrt(std::log(1.0 / delta_prime) / (2.0 * static_cast<double>(m)));
}

double up_alpha(std::size_t n, std::size_t m, double cap, double delta) {
  require_count(m, "up_alpha");
  require_count(n, "up_alpha");
  require_delta(delta, "up_alpha");
  if (!(cap >= 1.0) || !std::isfinite(cap)) throw DomainError("up_alpha needs a finite cap >= 1");
  const double md = static_cast<double>(m);
  const double doublings = std::log2(cap) + 1.0;
  const double arg = 11.0 * static_cast<double>(n) * md * md * doublings * doublings / delta;
  return std::sqrt(std::log(arg) / (2.0 * md));
}

double oracle_alpha(std::size_t n, std::size_t m, double delta) {
  require_count(m, "oracle_alpha");
  require_count(n, "oracle_alpha");
  require_delta(delta, "oracle_alpha");
  const double md = static_cast<double>(m);
  return std::sqrt(std::log(4.0 * static_cast<double>(n) * md * md / delta) / (2.0 * md));
}

double theoretical_epsilon(std::size_t n, std::size_t m, double delta) {
  require_count(m, "theoretical_epsilon");
  require_count(n, "theoretical_epsilon");
  require_delta(delta, "theoretical_epsilon");
  const double md = static_cast<double>(m);
  // ln(11 n m^4 / delta) split up so that m^4 cannot overflow.
  const double log_arg = std::log(11.0 * static_cast<double>(n) / delta) + 4.0 * std::log(md);
  return 3.0 * std::sqrt(log_arg / (2.0 * md));
}

ConfidenceBounds confidence_bounds(double utility_mean, double completion_fraction, double utility_at_cap,
                                   double alpha) {
  ConfidenceBounds b;
  b.ucb = utility_mean + (1.0 - utility_at_cap) * alpha;
  b.lcb = utility_mean - alpha - utility_at_cap * (1.0 - completion_fraction);
  return b;
}

ConfidenceBounds confidence_bounds(const AlgorithmStats& stats, const UtilityFunction& u) {
  return confidence_bounds(stats.utility_mean, stats.completion_fraction, u(stats.cap), stats.alpha);
}

double anytime_epsilon(std::span<const AlgorithmStats> candidates, const AlgorithmStats& star) {
  double worst = 0.0;
  for (const auto& s : candidates) worst = std::max(worst, s.ucb - star.lcb);
  return worst;
}

ProportionInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) throw DomainError("wilson_interval needs at least one trial");
  if (successes > trials) throw DomainError("wilson_interval: more successes than trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {p, std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace utiliconf
