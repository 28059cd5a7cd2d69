#include "utiliconf/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "utiliconf/errors.hpp"

namespace utiliconf {
namespace {

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be positive and finite");
}

// inf{t : u(t) <= x}, falling back to the machine-floor utility when u never
// gets that low.
double runtime_at_utility(const UtilityFunction& u, double x, double cap) {
  double t = x > 0.0 ? u.inverse(x) : kInfinity;
  if (std::isinf(t)) t = std::max(2.0 * cap, u.inverse(std::numeric_limits<double>::min()));
  if (std::isinf(t)) t = std::numeric_limits<double>::max();
  return t;
}

// Hidden mass pushed to a runtime where it is worth as much as possible:
// u(atom) * hidden >= tail - slack.
double challenger_atom(const RuntimeDistribution& d, const UtilityFunction& u, double cap, double slack) {
  const double hidden = d.survival(cap);
  const double tail = u(cap) * hidden;
  if (tail <= slack) return 2.0 * cap;
  return std::max(cap, runtime_at_utility(u, u(cap) - slack / hidden, cap));
}

// Hidden mass pushed to a runtime where it is worth at most slack in total.
double incumbent_atom(const RuntimeDistribution& d, const UtilityFunction& u, double cap, double slack) {
  const double hidden = d.survival(cap);
  const double tail = u(cap) * hidden;
  if (tail <= slack) return 2.0 * cap;
  const double target = slack / hidden;
  double atom = std::max(cap, runtime_at_utility(u, target, cap));
  // The infimum is not attained where u jumps down.
  if (u(atom) > target) atom = std::nextafter(atom, kInfinity);
  while (u(atom) > target && atom < std::numeric_limits<double>::max() / 2.0) atom *= 2.0;
  return atom;
}

}  // namespace

TruncatedView truncated_bounds(const RuntimeDistribution& d, const UtilityFunction& u, std::size_t algorithm,
                               double cap) {
  if (!(cap > 0.0)) throw DomainError("disclosure cap must be positive");
  TruncatedView v;
  v.algorithm = algorithm;
  v.cap = cap;
  v.lower = partial_expected_utility(d, u, cap);
  v.upper = v.lower + tail_term(d, u, cap);
  return v;
}

double comparison_slack(std::span<const RuntimeDistribution> dists) {
  const bool exact = std::all_of(dists.begin(), dists.end(), [](const auto& d) { return d.is_discrete(); });
  return exact ? 1e-12 : 1e-7;
}

SkepticVerdict skeptic_check(std::span<const TruncatedView> views, double epsilon, double slack) {
  require_epsilon(epsilon);
  if (views.empty()) throw DomainError("skeptic_check needs at least one view");
  SkepticVerdict verdict;
  for (std::size_t k = 1; k < views.size(); ++k) {
    if (views[k].lower > views[verdict.winner].lower) verdict.winner = k;
  }
  const double star = views[verdict.winner].lower;
  verdict.margin = kInfinity;
  for (std::size_t k = 0; k < views.size(); ++k) {
    if (k == verdict.winner) continue;
    const double margin = star - (views[k].upper - epsilon);
    if (margin < verdict.margin) {
      verdict.margin = margin;
      verdict.violator = k;
    }
  }
  verdict.certified = verdict.margin >= -slack;
  if (verdict.certified) verdict.violator.reset();
  verdict.winner = views[verdict.winner].algorithm;
  if (verdict.violator) verdict.violator = views[*verdict.violator].algorithm;
  return verdict;
}

CaptimePlan sufficient_captimes(std::span<const RuntimeDistribution> dists, const UtilityFunction& u,
                                double epsilon) {
  require_epsilon(epsilon);
  if (dists.empty()) throw DomainError("sufficient_captimes needs at least one distribution");
  CaptimePlan plan;
  for (const auto& d : dists) plan.utilities.push_back(expected_utility(d, u));
  plan.optimal = static_cast<std::size_t>(
      std::max_element(plan.utilities.begin(), plan.utilities.end()) - plan.utilities.begin());
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const double gap = plan.utilities[plan.optimal] - plan.utilities[i];
    plan.gaps.push_back(gap);
    double cap = smallest_cap_with_tail_below(dists[i], u, gap + epsilon / 2.0, false);
    // A zero cap discloses nothing; any cap below the support does the same.
    if (!(cap > 0.0)) cap = 0.5 * dists[i].support_min();
    plan.caps.push_back(cap);
  }
  return plan;
}

Witness adversarial_extension(const RuntimeDistribution& challenger_dist, const TruncatedView& challenger,
                              const RuntimeDistribution& incumbent_dist, const TruncatedView& incumbent,
                              const UtilityFunction& u, double epsilon, WitnessSlack mode) {
  require_epsilon(epsilon);
  const double excess = challenger.upper - incumbent.lower;
  if (challenger.algorithm == incumbent.algorithm || !(excess > epsilon)) {
    throw NoCounterexampleError("no counterexample: upper bound of algorithm " +
                                std::to_string(challenger.algorithm) + " exceeds the lower bound of algorithm " +
                                std::to_string(incumbent.algorithm) + " by at most epsilon");
  }
  const double slack = mode == WitnessSlack::BreakEven ? 2.0 * excess / 4.0 : (excess - epsilon) / 4.0;

  Witness w{challenger.algorithm, incumbent.algorithm, challenger_dist, incumbent_dist};
  w.challenger_atom = w.incumbent_atom = kInfinity;
  if (challenger_dist.survival(challenger.cap) > 0.0) {
    w.challenger_atom = challenger_atom(challenger_dist, u, challenger.cap, slack);
    w.challenger_distribution =
        RuntimeDistribution::truncated_extension(challenger_dist, challenger.cap, w.challenger_atom);
  }
  if (incumbent_dist.survival(incumbent.cap) > 0.0) {
    w.incumbent_atom = incumbent_atom(incumbent_dist, u, incumbent.cap, slack);
    w.incumbent_distribution =
        RuntimeDistribution::truncated_extension(incumbent_dist, incumbent.cap, w.incumbent_atom);
  }
  w.challenger_utility = expected_utility(w.challenger_distribution, u);
  w.incumbent_utility = expected_utility(w.incumbent_distribution, u);
  return w;
}

VerificationReport check_captimes(std::span<const RuntimeDistribution> dists, const UtilityFunction& u,
                                  double epsilon, std::span<const double> caps) {
  require_epsilon(epsilon);
  if (dists.empty()) throw DomainError("verification needs at least one distribution");
  if (caps.size() != dists.size()) throw DomainError("one cap per distribution expected");
  VerificationReport r;
  for (const auto& d : dists) r.plan.utilities.push_back(expected_utility(d, u));
  r.plan.optimal = static_cast<std::size_t>(
      std::max_element(r.plan.utilities.begin(), r.plan.utilities.end()) - r.plan.utilities.begin());
  for (double util : r.plan.utilities) r.plan.gaps.push_back(r.plan.utilities[r.plan.optimal] - util);
  r.plan.caps.assign(caps.begin(), caps.end());
  for (std::size_t i = 0; i < dists.size(); ++i) r.views.push_back(truncated_bounds(dists[i], u, i, caps[i]));
  r.slack = comparison_slack(dists);
  r.verdict = skeptic_check(r.views, epsilon, r.slack);
  r.winner_suboptimality = r.plan.gaps[r.verdict.winner];
  return r;
}

VerificationReport run_verification(std::span<const RuntimeDistribution> dists, const UtilityFunction& u,
                                    double epsilon) {
  const auto plan = sufficient_captimes(dists, u, epsilon);
  auto report = check_captimes(dists, u, epsilon, plan.caps);
  if (!report.verdict.certified) {
    throw NumericError("sufficient captimes failed the skeptic's check (margin " +
                       std::to_string(report.verdict.margin) + ")");
  }
  return report;
}

}  // namespace utiliconf
