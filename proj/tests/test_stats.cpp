#include <cmath>
#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "utiliconf/errors.hpp"
#include "utiliconf/execution.hpp"
#include "utiliconf/stats.hpp"

using namespace utiliconf;

namespace {

std::vector<RunRecord> records_at(const std::vector<double>& runtimes, double cap) {
  std::vector<RunRecord> out;
  for (std::size_t j = 0; j < runtimes.size(); ++j) {
    const bool done = runtimes[j] < cap;
    out.push_back({0, j, cap, done ? runtimes[j] : cap, done});
  }
  return out;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("empirical stats example") {
  const auto recs = records_at({1, 2, 5, 7}, 4.0);
  const auto e = empirical_stats(recs, UtilityFunction::uniform(60.0));
  CHECK(e.utility_mean == doctest::Approx(229.0 / 240.0).epsilon(1e-15));
  CHECK(e.completion_fraction == 0.5);

  const auto capped = empirical_stats(records_at({10, 20}, 5.0), UtilityFunction::uniform(60.0));
  CHECK(capped.completion_fraction == 0.0);
  CHECK(capped.utility_mean == doctest::Approx(55.0 / 60.0).epsilon(1e-15));

  const auto instant = empirical_stats(records_at({1e-12, 1e-12}, 5.0), UtilityFunction::uniform(60.0));
  CHECK(instant.completion_fraction == 1.0);
  CHECK(instant.utility_mean == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empirical stats errors") {
  const auto u = UtilityFunction::uniform(60.0);
  CHECK_THROWS_AS(empirical_stats({}, u), DomainError);
  auto mixed = records_at({1, 2}, 4.0);
  mixed[1].cap = 8.0;
  CHECK_THROWS_AS(empirical_stats(mixed, u), DomainError);
}

TEST_CASE("accumulator matches a rebuild") {
  const auto u = UtilityFunction::log_laplace(60.0);
  const auto recs = records_at({1, 70, 3, 400, 5, 6}, 100.0);
  EmpiricalAccumulator acc;
  for (const auto& r : recs) acc.add(r, u);
  const auto a = acc.estimate();
  const auto b = empirical_stats(recs, u);
  CHECK(a.utility_mean == b.utility_mean);
  CHECK(a.completion_fraction == b.completion_fraction);
}

TEST_CASE("radius formulas") {
  CHECK(hoeffding_radius(200, 0.05) == doctest::Approx(std::sqrt(std::log(20.0) / 400.0)).epsilon(1e-15));
  CHECK(hoeffding_radius(200, 0.05) == doctest::Approx(0.086536).epsilon(1e-5));
  CHECK(hoeffding_radius(10, 1.0) == 0.0);
  CHECK(up_alpha(2, 1, 1.0, 0.1) == doctest::Approx(std::sqrt(std::log(220.0) / 2.0)).epsilon(1e-15));
  CHECK(up_alpha(2, 1, 1.0, 0.1) == doctest::Approx(1.64219).epsilon(1e-5));
  CHECK(up_alpha(3, 10, 8.0, 0.1) ==
        doctest::Approx(std::sqrt(std::log(11.0 * 3 * 100 * 16 / 0.1) / 20.0)).epsilon(1e-15));
  CHECK(oracle_alpha(2, 5, 0.1) == doctest::Approx(std::sqrt(std::log(4.0 * 2 * 25 / 0.1) / 10.0)).epsilon(1e-15));
  CHECK(theoretical_epsilon(10, 10000, 0.05) == doctest::Approx(0.14159).epsilon(1e-4));
  CHECK(theoretical_epsilon(10, 10000, 0.05) ==
        doctest::Approx(3.0 * std::sqrt(std::log(2.2e19) / 2e4)).epsilon(1e-14));
  // No overflow where m^4 alone would overflow a double.
  CHECK(std::isfinite(theoretical_epsilon(5, std::size_t{1} << 62, 0.1)));

  CHECK_THROWS_AS(hoeffding_radius(0, 0.1), DomainError);
  CHECK_THROWS_AS(hoeffding_radius(5, 0.0), DomainError);
  CHECK_THROWS_AS(up_alpha(2, 3, 0.5, 0.1), DomainError);
  CHECK_THROWS_AS(theoretical_epsilon(2, 3, 1.0), DomainError);
}

TEST_CASE("theoretical epsilon is strictly decreasing in m") {
  double previous = theoretical_epsilon(5, 1, 0.1);
  for (std::size_t m = 2; m < 50000; m += (m < 100 ? 1 : 97)) {
    const double e = theoretical_epsilon(5, m, 0.1);
    CHECK(e < previous);
    previous = e;
  }
}

TEST_CASE("confidence bound examples") {
  auto b = confidence_bounds(0.9, 1.0, 0.5, 0.1);
  CHECK(b.ucb == doctest::Approx(0.95).epsilon(1e-15));
  CHECK(b.lcb == doctest::Approx(0.8).epsilon(1e-15));
  b = confidence_bounds(0.6, 0.3, 0.0, 0.1);
  CHECK(b.ucb == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(b.lcb == doctest::Approx(0.5).epsilon(1e-15));
  // Not clamped.
  b = confidence_bounds(0.99, 1.0, 0.0, 0.5);
  CHECK(b.ucb > 1.0);
}

TEST_CASE("anytime epsilon examples") {
  std::vector<AlgorithmStats> s(2);
  s[0].ucb = 0.8;
  s[0].lcb = 0.75;
  s[1].ucb = 0.7;
  s[1].lcb = 0.6;
  CHECK(anytime_epsilon(s, s[0]) == doctest::Approx(0.05).epsilon(1e-15));
  s[0].lcb = 0.9;
  s[0].ucb = 0.85;
  CHECK(anytime_epsilon(s, s[0]) == 0.0);
}

TEST_CASE("wilson interval") {
  const auto ci = wilson_interval(90, 100);
  CHECK(ci.estimate == 0.9);
  CHECK(ci.lower == doctest::Approx(0.8256).epsilon(1e-3));
  CHECK(ci.upper == doctest::Approx(0.9448).epsilon(1e-3));
  const auto all = wilson_interval(200, 200);
  CHECK(all.upper == 1.0);
  CHECK(all.lower > 0.98);
  CHECK_THROWS_AS(wilson_interval(3, 2), DomainError);
}

TEST_CASE("hoeffding coverage of F and the capped utility") {
  // delta' = 0.05 per side; target coverage 0.90, accept 0.88.
  const auto d = RuntimeDistribution::discrete({{2.0, 0.3}, {10.0, 0.2}, {40.0, 0.3}, {400.0, 0.2}});
  const auto u = UtilityFunction::log_laplace(60.0);
  const double cap = 40.0;
  const double true_u = expected_utility(d, u, cap);
  const double true_f = d.completion_probability(cap);
  const std::size_t m = 100, batches = 2000;
  const double r = hoeffding_radius(m, 0.05);
  std::size_t cover_u = 0, cover_f = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    KeyedStream rng(31337, b, 0);
    std::vector<double> ts;
    for (std::size_t j = 0; j < m; ++j) ts.push_back(d.sample(rng));
    const auto e = empirical_stats(records_at(ts, cap), u);
    if (std::abs(e.utility_mean - true_u) <= (1.0 - u(cap)) * r) ++cover_u;
    if (std::abs(e.completion_fraction - true_f) <= r) ++cover_f;
  }
  CHECK(static_cast<double>(cover_u) / batches >= 0.88);
  CHECK(static_cast<double>(cover_f) / batches >= 0.88);
}

TEST_CASE("simultaneous bounds and width under the good events") {
  const std::vector<RuntimeDistribution> arms{
      RuntimeDistribution::discrete({{1.0, 0.5}, {30.0, 0.3}, {200.0, 0.2}}),
      RuntimeDistribution::discrete({{5.0, 0.6}, {50.0, 0.4}}),
      RuntimeDistribution::discrete({{2.0, 0.2}, {20.0, 0.2}, {80.0, 0.6}})};
  const auto u = UtilityFunction::uniform(100.0);
  const double delta = 0.1, cap = 50.0;
  const std::size_t n = arms.size(), m = 200, trials = 1000;
  const double alpha = hoeffding_radius(m, delta / (4.0 * n));
  std::size_t all_hold = 0, width_violations = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      KeyedStream rng(555, t, i);
      std::vector<double> ts;
      for (std::size_t j = 0; j < m; ++j) ts.push_back(arms[i].sample(rng));
      const auto e = empirical_stats(records_at(ts, cap), u);
      const auto b = confidence_bounds(e.utility_mean, e.completion_fraction, u(cap), alpha);
      const double truth = expected_utility(arms[i], u);
      const bool good = std::abs(e.utility_mean - expected_utility(arms[i], u, cap)) <= alpha &&
                        std::abs(e.completion_fraction - arms[i].completion_probability(cap)) <= alpha;
      ok = ok && b.lcb <= truth && truth <= b.ucb;
      // P(T >= cap): a run sitting exactly on the cap counts as capped.
      const double hidden = 1.0 - arms[i].completion_probability(cap);
      if (good && b.ucb - b.lcb > 2.0 * alpha + u(cap) * hidden + 1e-12) ++width_violations;
    }
    if (ok) ++all_hold;
  }
  CHECK(static_cast<double>(all_hold) / trials >= 1.0 - delta);
  CHECK(width_violations == 0);
}

}
