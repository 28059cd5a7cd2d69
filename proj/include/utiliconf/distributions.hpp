#pragma once

#include <memory>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "utiliconf/rng.hpp"
#include "utiliconf/utility.hpp"

namespace utiliconf {

class RuntimeDistribution;

struct DiscreteRuntime {
  // (runtime, probability), runtimes strictly positive and ascending.
  std::vector<std::pair<double, double>> atoms;
  std::vector<double> cumulative;  // cumulative[k] = P(T <= atoms[k].first)
  std::vector<double> upper_tail;  // upper_tail[k] = P(T > atoms[k].first)
};

struct LogNormalRuntime {
  double mu = 0.0;
  double sigma = 1.0;
};

struct ParetoRuntime {
  double x_min = 1.0;
  double shape = 1.0;
};

struct MixtureRuntime {
  std::vector<std::pair<double, RuntimeDistribution>> components;
};

// Agrees with `base` on [0, cut] and moves every run longer than `cut` to a
// single atom at `atom` >= cut.
struct TruncatedExtensionRuntime {
  std::shared_ptr<const RuntimeDistribution> base;
  double cut = 1.0;
  double atom = 1.0;
};

// Runtime distribution D_i of one algorithm. Cheap to copy, immutable.
class RuntimeDistribution {
 public:
  using Form = std::variant<DiscreteRuntime, LogNormalRuntime, ParetoRuntime, MixtureRuntime,
                            TruncatedExtensionRuntime>;

  static RuntimeDistribution discrete(std::vector<std::pair<double, double>> atoms);
  static RuntimeDistribution point_mass(double runtime) { return discrete({{runtime, 1.0}}); }
  static RuntimeDistribution lognormal(double mu, double sigma);
  static RuntimeDistribution pareto(double x_min, double shape);
  static RuntimeDistribution mixture(std::vector<std::pair<double, RuntimeDistribution>> components);
  static RuntimeDistribution truncated_extension(const RuntimeDistribution& base, double cut,
                                                 double atom);

  // P(T <= t).
  double cdf(double t) const;
  // P(T < t): the probability that a run capped at t completes.
  double completion_probability(double t) const;
  // P(T > t), computed without cancellation where the form allows it.
  double survival(double t) const;

  // inf{t : F(t) >= p} for p in (0,1); the bottom of the support for p = 0.
  // p = 1 is allowed only for bounded supports.
  double quantile(double p) const;

  // Inverse-transform draw from a uniform variate v in (0,1). Mixtures pick a
  // component with v and rescale it, which is still a single-uniform sampler.
  double sample_from_uniform(double v) const;

  template <std::uniform_random_bit_generator G>
  double sample(G& gen) const {
    return sample_from_uniform(open_unit(gen));
  }

  double support_min() const;
  // kInfinity for unbounded supports.
  double support_max() const;
  bool is_discrete() const;

  const Form& form() const { return *form_; }

 private:
  explicit RuntimeDistribution(Form form) : form_(std::make_shared<const Form>(std::move(form))) {}
  std::shared_ptr<const Form> form_;
};

// E[u(T); T <= cap]. Exact for discrete parts; adaptive Simpson in
// probability space for continuous parts. cap may be kInfinity.
double partial_expected_utility(const RuntimeDistribution& d, const UtilityFunction& u, double cap);

// U(cap) = E[u(min(T, cap))]; cap = kInfinity gives the uncapped U.
double expected_utility(const RuntimeDistribution& d, const UtilityFunction& u, double cap = kInfinity);

// u(cap) (1 - F(cap)), the capping error bound. Zero for cap = kInfinity.
double tail_term(const RuntimeDistribution& d, const UtilityFunction& u, double cap);

// E[min(T, cap)]: expected simulated cost of one capped run.
double expected_capped_runtime(const RuntimeDistribution& d, double cap);

// inf{kappa >= 0 : tail_term(d, u, kappa) <= threshold}, or with `< threshold`
// when `strict`. Exact for discrete forms (interval by interval between atoms);
// other forms bisect to `tolerance` seconds and return the upper end, so the
// result satisfies the inequality and overshoots the infimum by at most the
// tolerance. For discrete forms in strict mode the infimum itself is
// returned, which need not satisfy a strict inequality.
double smallest_cap_with_tail_below(const RuntimeDistribution& d, const UtilityFunction& u,
                                    double threshold, bool strict, double tolerance = 1e-9);

std::string describe(const RuntimeDistribution& d);

}  // namespace utiliconf
