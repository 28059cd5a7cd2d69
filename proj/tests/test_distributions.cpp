#include <cmath>
#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "utiliconf/distributions.hpp"
#include "utiliconf/errors.hpp"
#include "utiliconf/rng.hpp"
#include "utiliconf/stats.hpp"

using namespace utiliconf;

namespace {

RuntimeDistribution two_point() { return RuntimeDistribution::discrete({{10.0, 0.5}, {100.0, 0.5}}); }

}  // namespace

TEST_SUITE("distributions") {

TEST_CASE("cdf and quantile examples") {
  const auto d = two_point();
  CHECK(d.cdf(10.0) == 0.5);
  CHECK(d.cdf(0.0) == 0.0);
  CHECK(d.cdf(99.0) == 0.5);
  CHECK(d.cdf(100.0) == 1.0);
  CHECK(d.quantile(0.5) == 10.0);
  CHECK(d.quantile(0.0) == 10.0);
  CHECK(d.quantile(0.75) == 100.0);
  CHECK(d.quantile(1.0) == 100.0);

  const auto p = RuntimeDistribution::pareto(1.0, 2.0);
  CHECK(p.cdf(2.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(p.quantile(0.75) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(p.quantile(0.0) == 1.0);
  CHECK_THROWS_AS(p.quantile(1.0), DomainError);
}

TEST_CASE("strict completion at atoms") {
  const auto d = two_point();
  CHECK(d.completion_probability(10.0) == 0.0);
  CHECK(d.completion_probability(10.5) == 0.5);
  CHECK(d.survival(10.0) == 0.5);
  CHECK(d.survival(100.0) == 0.0);
}

TEST_CASE("lognormal matches closed forms") {
  const auto d = RuntimeDistribution::lognormal(std::log(5.0), 0.8);
  CHECK(d.cdf(5.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(d.quantile(0.5) == doctest::Approx(5.0).epsilon(1e-12));
  for (double p : {1e-6, 0.01, 0.3, 0.9, 0.999999}) CHECK(d.cdf(d.quantile(p)) == doctest::Approx(p).epsilon(1e-9));
  CHECK(d.cdf(0.0) == 0.0);
  CHECK(d.survival(1e9) < 1e-100);
}

TEST_CASE("mixture quantile inverts the cdf") {
  const auto d = RuntimeDistribution::mixture(
      {{0.7, RuntimeDistribution::lognormal(0.0, 0.5)}, {0.3, RuntimeDistribution::pareto(600.0, 0.5)}});
  for (double p : {0.01, 0.5, 0.69, 0.71, 0.9, 0.999}) {
    const double t = d.quantile(p);
    CHECK(d.cdf(t) >= p - 1e-12);
    CHECK(d.cdf(t * (1.0 - 1e-9)) <= p + 1e-9);
  }
  CHECK(d.support_min() == 0.0);
  CHECK(std::isinf(d.support_max()));
}

TEST_CASE("point mass sampling and determinism") {
  const auto d = RuntimeDistribution::point_mass(10.0);
  KeyedStream a(3, 0, 0);
  for (int k = 0; k < 100; ++k) CHECK(d.sample(a) == 10.0);

  const auto ln = RuntimeDistribution::lognormal(1.0, 1.0);
  KeyedStream s1(99, 4, 2), s2(99, 4, 2);
  for (int k = 0; k < 100; ++k) CHECK(ln.sample(s1) == ln.sample(s2));
}

TEST_CASE("sampling agrees with the cdf (DKW bound)") {
  // P(sup |F_n - F| > e) <= 2 exp(-2 n e^2); e = 0.01 at n = 40000 gives 6.7e-4.
  const std::vector<RuntimeDistribution> cases{
      RuntimeDistribution::lognormal(0.5, 1.2), RuntimeDistribution::pareto(2.0, 0.7),
      RuntimeDistribution::mixture(
          {{0.6, RuntimeDistribution::lognormal(0.0, 0.5)}, {0.4, RuntimeDistribution::pareto(600.0, 0.5)}}),
      two_point()};
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& d = cases[c];
    const int n = 40000;
    std::vector<double> xs;
    KeyedStream rng(2024, c, 0);
    for (int k = 0; k < n; ++k) xs.push_back(d.sample(rng));
    std::sort(xs.begin(), xs.end());
    double worst = 0.0;
    // Compare at the last copy of each value (cdf) and the first (strict cdf).
    for (int k = 0; k < n; ++k) {
      if (k + 1 == n || xs[k + 1] != xs[k]) worst = std::max(worst, std::abs(d.cdf(xs[k]) - (k + 1.0) / n));
      if (k == 0 || xs[k - 1] != xs[k]) {
        worst = std::max(worst, std::abs(d.completion_probability(xs[k]) - static_cast<double>(k) / n));
      }
    }
    CHECK(worst < 0.01);
  }
}

TEST_CASE("expected utility examples") {
  const auto d = two_point();
  const auto u = UtilityFunction::uniform(60.0);
  CHECK(expected_utility(d, u) == doctest::Approx(5.0 / 12.0).epsilon(1e-15));
  CHECK(expected_utility(d, u, 30.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(tail_term(d, u, 30.0) == 0.25);
  CHECK(tail_term(d, u, 60.0) == 0.0);
  CHECK(tail_term(d, u, 1000.0) == 0.0);
  CHECK(expected_utility(RuntimeDistribution::point_mass(1e-9), UtilityFunction::log_laplace(60.0)) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sandwich and monotone tail on random discrete distributions") {
  KeyedStream rng(11, 0, 0);
  const std::vector<UtilityFunction> us{UtilityFunction::uniform(60.0), UtilityFunction::log_laplace(60.0)};
  for (int k = 0; k < 200; ++k) {
    const auto d = testing::random_discrete(rng);
    for (const auto& u : us) {
      const double full = expected_utility(d, u);
      double previous_tail = 1.0;
      for (double cap : {0.25, 1.0, 5.0, 10.0, 30.0, 60.0, 120.0, 400.0, 1000.0}) {
        const double capped = expected_utility(d, u, cap);
        const double tail = tail_term(d, u, cap);
        CHECK(capped - tail <= full + 1e-12);
        CHECK(full <= capped + 1e-12);
        CHECK(tail <= previous_tail);
        previous_tail = tail;
      }
    }
  }
}

TEST_CASE("quadrature agrees with Monte Carlo within 3 standard errors") {
  const std::vector<RuntimeDistribution> cases{
      RuntimeDistribution::lognormal(std::log(20.0), 1.0), RuntimeDistribution::pareto(5.0, 0.8),
      RuntimeDistribution::mixture(
          {{0.8, RuntimeDistribution::lognormal(std::log(2.0), 0.6)}, {0.2, RuntimeDistribution::pareto(600.0, 0.5)}})};
  const std::vector<UtilityFunction> us{UtilityFunction::uniform(60.0), UtilityFunction::log_laplace(60.0)};
  std::uint64_t stream = 0;
  for (const auto& d : cases) {
    for (const auto& u : us) {
      for (double cap : {kInfinity, 45.0}) {
        const double exact = expected_utility(d, u, cap);
        KeyedStream rng(77, stream++, 0);
        const int n = 1'000'000;
        CompensatedSum s, s2;
        for (int k = 0; k < n; ++k) {
          const double x = u(std::min(d.sample(rng), cap));
          s.add(x);
          s2.add(x * x);
        }
        const double mean = s.value() / n;
        const double se = std::sqrt(std::max(0.0, s2.value() / n - mean * mean) / n);
        CHECK(std::abs(mean - exact) <= 3.0 * se + 1e-12);
      }
    }
  }
}

TEST_CASE("expected capped runtime") {
  CHECK(expected_capped_runtime(two_point(), 50.0) == 30.0);
  const auto p = RuntimeDistribution::pareto(600.0, 0.5);
  // E[min(T, k)] = 2 sqrt(600 k) - 600 for k >= 600.
  CHECK(expected_capped_runtime(p, 2400.0) == doctest::Approx(1800.0).epsilon(1e-8));
}

TEST_CASE("smallest cap with tail below") {
  const auto d = two_point();
  const auto u = UtilityFunction::uniform(60.0);
  // 0.5 (1 - k/60) <= 0.3 first holds at k = 24.
  CHECK(smallest_cap_with_tail_below(d, u, 0.3, false) == doctest::Approx(24.0).epsilon(1e-12));
  // Strict inequality: the infimum is the same point.
  CHECK(smallest_cap_with_tail_below(d, u, 0.3, true) == doctest::Approx(24.0).epsilon(1e-12));
  // Above the largest atom the tail is 0.
  CHECK(smallest_cap_with_tail_below(d, u, 0.0, false) == 60.0);

  const auto ln = RuntimeDistribution::lognormal(std::log(30.0), 1.0);
  const auto ll = UtilityFunction::log_laplace(60.0);
  const double k = smallest_cap_with_tail_below(ln, ll, 0.1, false);
  CHECK(tail_term(ln, ll, k) <= 0.1);
  CHECK(tail_term(ln, ll, k - 1e-8) > 0.1);
}

TEST_CASE("truncated extension keeps the disclosed part") {
  const auto base = RuntimeDistribution::lognormal(std::log(20.0), 1.0);
  const auto ext = RuntimeDistribution::truncated_extension(base, 40.0, 500.0);
  for (double t : {1.0, 10.0, 39.0, 40.0}) CHECK(ext.cdf(t) == base.cdf(t));
  CHECK(ext.cdf(499.0) == base.cdf(40.0));
  CHECK(ext.cdf(500.0) == 1.0);
  const auto u = UtilityFunction::uniform(600.0);
  CHECK(expected_utility(ext, u) ==
        doctest::Approx(partial_expected_utility(base, u, 40.0) + u(500.0) * base.survival(40.0)).epsilon(1e-12));
  CHECK_THROWS_AS(RuntimeDistribution::truncated_extension(base, 40.0, 30.0), DomainError);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(RuntimeDistribution::discrete({{0.0, 1.0}}), DomainError);
  CHECK_THROWS_AS(RuntimeDistribution::discrete({{1.0, 0.5}, {2.0, 0.4}}), DomainError);
  CHECK_THROWS_AS(RuntimeDistribution::discrete({{2.0, 0.5}, {1.0, 0.5}}), DomainError);
  CHECK_THROWS_AS(RuntimeDistribution::lognormal(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(RuntimeDistribution::pareto(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(two_point().cdf(-1.0), DomainError);
}

}
