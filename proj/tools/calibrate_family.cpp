// Builds the shipped five-arm benchmark family: lognormal bodies with Pareto
// tails, tail weights bisected so that the gaps under loglaplace:60,1 are
// 0, 0.05, 0.1, 0.2 and 0.4. Prints Naive's expected cost curve as a sanity
// check and writes the spec to the path given as the only argument.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "utiliconf/distributions.hpp"
#include "utiliconf/procedures.hpp"
#include "utiliconf/synthetic_spec.hpp"

using namespace utiliconf;

namespace {

struct ArmShape {
  std::string name;
  double median;
  double sigma;
  double gap;  // target; the first arm's tail weight is fixed instead
};

constexpr double kTailStart = 600.0;
constexpr double kTailShape = 0.5;
constexpr double kReferenceTailWeight = 0.01;

RuntimeDistribution arm(const ArmShape& s, double tail_weight) {
  return RuntimeDistribution::mixture({{1.0 - tail_weight, RuntimeDistribution::lognormal(std::log(s.median), s.sigma)},
                                       {tail_weight, RuntimeDistribution::pareto(kTailStart, kTailShape)}});
}

double naive_cost(const std::vector<RuntimeDistribution>& dists, const UtilityFunction& u, double eps, double cap) {
  const auto m = naive_sample_count(dists.size(), 0.1, eps, u(cap));
  double per_round = 0.0;
  for (const auto& d : dists) per_round += expected_capped_runtime(d, cap);
  return static_cast<double>(m) * per_round;
}

}  // namespace

int main(int argc, char** argv) {
  const auto u = UtilityFunction::log_laplace(60.0, 1.0);
  const std::vector<ArmShape> shapes{{"fast", 1.0, 0.5, 0.0},
                                     {"near", 1.2, 0.5, 0.05},
                                     {"fair", 2.0, 0.6, 0.1},
                                     {"slow", 5.0, 0.6, 0.2},
                                     {"worst", 10.0, 0.7, 0.4}};
  SyntheticSpec spec{"lognormal-pareto-5", u.describe(), {}};
  const double best = expected_utility(arm(shapes[0], kReferenceTailWeight), u);
  spec.algorithms.push_back({shapes[0].name, arm(shapes[0], kReferenceTailWeight)});
  for (std::size_t i = 1; i < shapes.size(); ++i) {
    const double target = best - shapes[i].gap;
    double lo = 0.0, hi = 1.0;  // utility falls as the tail weight grows
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (expected_utility(arm(shapes[i], mid), u) > target ? lo : hi) = mid;
    }
    spec.algorithms.push_back({shapes[i].name, arm(shapes[i], 0.5 * (lo + hi))});
  }

  const auto dists = spec.distributions();
  std::printf("arm     tail_w        U            gap          E[min(T,600)]\n");
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const auto& mix = std::get<MixtureRuntime>(dists[i].form());
    const double ui = expected_utility(dists[i], u);
    std::printf("%-6s  %.10f  %.10f  %.10f  %.3f\n", spec.algorithms[i].name.c_str(), mix.components[1].first, ui,
                best - ui, expected_capped_runtime(dists[i], 600.0));
  }
  std::printf("\nNaive expected cost, loglaplace:60,1, eps=0.1\n");
  for (double cap : {350.0, 400.0, 500.0, 600.0, 800.0, 1000.0, 1500.0, 2500.0, 5000.0, 10000.0, 30000.0, 100000.0}) {
    std::printf("  kappa=%-8g %.4g\n", cap, naive_cost(dists, u, 0.1, cap));
  }
  const auto uniform = UtilityFunction::uniform(60.0);
  std::printf("\nUniform(60) utilities:");
  for (const auto& d : dists) std::printf(" %.4f", expected_utility(d, uniform));
  std::printf("\nNaive expected cost, uniform:60, eps=0.1: kappa=60 %.4g, kappa=600 %.4g\n",
              naive_cost(dists, uniform, 0.1, 60.0), naive_cost(dists, uniform, 0.1, 600.0));

  if (argc > 1) {
    save_synthetic_spec(spec, argv[1]);
    std::printf("wrote %s\n", argv[1]);
  }
  return 0;
}
