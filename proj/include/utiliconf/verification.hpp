#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "utiliconf/distributions.hpp"
#include "utiliconf/utility.hpp"

namespace utiliconf {

// What a skeptic learns about algorithm i when its CDF is disclosed up to
// `cap`: lower = E[u(T); T <= cap], upper = lower + u(cap)(1 - F(cap)).
struct TruncatedView {
  std::size_t algorithm = 0;
  double cap = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

TruncatedView truncated_bounds(const RuntimeDistribution& d, const UtilityFunction& u, std::size_t algorithm,
                               double cap);

// Padding for the skeptic's comparisons: 1e-12 when every distribution is
// discrete (sums only), 1e-7 when quadrature is involved.
double comparison_slack(std::span<const RuntimeDistribution> dists);

struct SkepticVerdict {
  bool certified = false;
  std::size_t winner = 0;  // argmax of lower bounds, lowest index on ties
  // Arm with the largest upper - epsilon - winner.lower, if the check failed.
  std::optional<std::size_t> violator;
  // min over i != winner of winner.lower - (upper_i - epsilon); kInfinity for n = 1.
  double margin = 0.0;
};

// Passes iff lower_winner >= upper_i - epsilon - slack for every other arm.
SkepticVerdict skeptic_check(std::span<const TruncatedView> views, double epsilon, double slack = 0.0);

struct CaptimePlan {
  std::vector<double> utilities;  // exact U_i
  std::size_t optimal = 0;
  std::vector<double> gaps;       // U_opt - U_i
  std::vector<double> caps;       // smallest cap with tail term <= gap + epsilon/2
};

CaptimePlan sufficient_captimes(std::span<const RuntimeDistribution> dists, const UtilityFunction& u,
                                double epsilon);

// How much of the bound gap each hidden tail gives away. BreakEven uses a
// quarter of 2(upper_i - lower_star), which only guarantees U_i >= U_star.
// Strict uses a quarter of (upper_i - lower_star - epsilon), which forces
// U_i - U_star > epsilon.
enum class WitnessSlack { BreakEven, Strict };

struct Witness {
  std::size_t challenger = 0;
  std::size_t incumbent = 0;
  RuntimeDistribution challenger_distribution;
  RuntimeDistribution incumbent_distribution;
  double challenger_atom = 0.0;  // where the hidden mass went, kInfinity if there was none
  double incumbent_atom = 0.0;
  double challenger_utility = 0.0;  // exact U under the extension
  double incumbent_utility = 0.0;
};

// Rewrites the mass above each disclosed cap so that the challenger beats
// the incumbent. Throws NoCounterexampleError unless
// challenger.upper - incumbent.lower > epsilon and the arms differ.
Witness adversarial_extension(const RuntimeDistribution& challenger_dist, const TruncatedView& challenger,
                              const RuntimeDistribution& incumbent_dist, const TruncatedView& incumbent,
                              const UtilityFunction& u, double epsilon,
                              WitnessSlack mode = WitnessSlack::Strict);

struct VerificationReport {
  CaptimePlan plan;
  std::vector<TruncatedView> views;
  SkepticVerdict verdict;
  double slack = 0.0;
  // U_opt - U_winner, meaningful when certified.
  double winner_suboptimality = 0.0;
};

// Skeptic's check with caller-chosen caps; plan.caps holds those caps.
VerificationReport check_captimes(std::span<const RuntimeDistribution> dists, const UtilityFunction& u,
                                  double epsilon, std::span<const double> caps);

// Sufficient caps followed by the skeptic's check. Throws NumericError if the
// check fails, which valid inputs never do.
VerificationReport run_verification(std::span<const RuntimeDistribution> dists, const UtilityFunction& u,
                                    double epsilon);

}  // namespace utiliconf
