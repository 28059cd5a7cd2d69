#include "utiliconf/distributions.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numeric>
#include <sstream>

#include "utiliconf/csv.hpp"
#include "utiliconf/errors.hpp"
#include "utiliconf/quadrature.hpp"

namespace utiliconf {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Continuous parts are integrated in probability space up to this level; the
// remaining 1e-12 of mass contributes at most 1e-12 to any utility integral.
constexpr double kTopProbability = 1.0 - 1e-12;

constexpr double kSqrt2 = 1.41421356237309504880;

double std_normal_quantile(double p) { return -kSqrt2 * boost::math::erfc_inv(2.0 * p); }

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(std::string(what) + " needs a probability in [0,1], got " + std::to_string(p));
  }
}

void require_time(double t, const char* what) {
  if (std::isnan(t) || t < 0.0) {
    throw DomainError(std::string(what) + " needs a runtime >= 0, got " + std::to_string(t));
  }
}

// Integral of g(Q(p)) over p in [0, p_hi] for a continuous quantile function,
// split at the probability levels of `kink_times` so each piece is smooth.
template <class Quantile, class G>
double integrate_over_quantiles(const Quantile& quantile, const G& g, double p_hi,
                                const std::vector<double>& kink_levels) {
  std::vector<double> cuts{0.0};
  for (double level : kink_levels) {
    if (level > 0.0 && level < p_hi) cuts.push_back(level);
  }
  cuts.push_back(p_hi);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    total += adaptive_simpson([&](double p) { return g(quantile(p)); }, cuts[k], cuts[k + 1]);
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------- factories

RuntimeDistribution RuntimeDistribution::discrete(std::vector<std::pair<double, double>> atoms) {
  if (atoms.empty()) throw DomainError("discrete distribution needs at least one atom");
  double total = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const auto [t, p] = atoms[k];
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("discrete atoms must be positive and finite");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("discrete atom probabilities must lie in [0,1]");
    if (k > 0 && !(t > atoms[k - 1].first)) throw DomainError("discrete atoms must be strictly ascending");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("discrete probabilities sum to " + std::to_string(total) + ", not 1");
  }
  DiscreteRuntime d;
  d.cumulative.resize(atoms.size());
  d.upper_tail.resize(atoms.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    acc += atoms[k].second;
    d.cumulative[k] = std::min(acc, 1.0);
  }
  d.cumulative.back() = 1.0;
  acc = 0.0;
  for (std::size_t k = atoms.size(); k-- > 0;) {
    d.upper_tail[k] = std::min(acc, 1.0);
    acc += atoms[k].second;
  }
  d.atoms = std::move(atoms);
  return RuntimeDistribution(std::move(d));
}

RuntimeDistribution RuntimeDistribution::lognormal(double mu, double sigma) {
  if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("lognormal needs finite mu and positive finite sigma");
  }
  return RuntimeDistribution(LogNormalRuntime{mu, sigma});
}

RuntimeDistribution RuntimeDistribution::pareto(double x_min, double shape) {
  if (!(x_min > 0.0) || !std::isfinite(x_min) || !(shape > 0.0) || !std::isfinite(shape)) {
    throw DomainError("pareto needs positive finite x_min and shape");
  }
  return RuntimeDistribution(ParetoRuntime{x_min, shape});
}

RuntimeDistribution RuntimeDistribution::mixture(
    std::vector<std::pair<double, RuntimeDistribution>> components) {
  if (components.empty()) throw DomainError("mixture needs at least one component");
  double total = 0.0;
  for (const auto& [w, d] : components) {
    if (!(w >= 0.0 && w <= 1.0)) throw DomainError("mixture weights must lie in [0,1]");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("mixture weights sum to " + std::to_string(total) + ", not 1");
  }
  return RuntimeDistribution(MixtureRuntime{std::move(components)});
}

RuntimeDistribution RuntimeDistribution::truncated_extension(const RuntimeDistribution& base,
                                                             double cut, double atom) {
  if (!(cut > 0.0) || !std::isfinite(cut)) throw DomainError("truncated extension needs a positive cut");
  if (!(atom >= cut) || !std::isfinite(atom)) {
    throw DomainError("truncated extension atom must be finite and >= cut");
  }
  return RuntimeDistribution(
      TruncatedExtensionRuntime{std::make_shared<const RuntimeDistribution>(base), cut, atom});
}

// ---------------------------------------------------------------- CDF family

double RuntimeDistribution::cdf(double t) const {
  require_time(t, "cdf");
  return std::visit(
      overloaded{
          [t](const DiscreteRuntime& d) {
            const auto it = std::upper_bound(d.atoms.begin(), d.atoms.end(), t,
                                             [](double x, const auto& a) { return x < a.first; });
            if (it == d.atoms.begin()) return 0.0;
            return d.cumulative[static_cast<std::size_t>(it - d.atoms.begin()) - 1];
          },
          [t](const LogNormalRuntime& d) {
            if (t <= 0.0) return 0.0;
            if (std::isinf(t)) return 1.0;
            return 0.5 * std::erfc(-(std::log(t) - d.mu) / (d.sigma * kSqrt2));
          },
          [t](const ParetoRuntime& d) {
            if (t < d.x_min) return 0.0;
            return -std::expm1(d.shape * std::log(d.x_min / t));
          },
          [t](const MixtureRuntime& d) {
            double acc = 0.0;
            for (const auto& [w, c] : d.components) acc += w * c.cdf(t);
            return std::min(acc, 1.0);
          },
          [t](const TruncatedExtensionRuntime& d) {
            if (t >= d.atom) return 1.0;
            return d.base->cdf(std::min(t, d.cut));
          },
      },
      *form_);
}

double RuntimeDistribution::survival(double t) const {
  require_time(t, "survival");
  return std::visit(
      overloaded{
          [t](const DiscreteRuntime& d) {
            const auto it = std::upper_bound(d.atoms.begin(), d.atoms.end(), t,
                                             [](double x, const auto& a) { return x < a.first; });
            if (it == d.atoms.begin()) return 1.0;
            return d.upper_tail[static_cast<std::size_t>(it - d.atoms.begin()) - 1];
          },
          [t](const LogNormalRuntime& d) {
            if (t <= 0.0) return 1.0;
            if (std::isinf(t)) return 0.0;
            return 0.5 * std::erfc((std::log(t) - d.mu) / (d.sigma * kSqrt2));
          },
          [t](const ParetoRuntime& d) {
            if (t < d.x_min) return 1.0;
            return std::pow(d.x_min / t, d.shape);
          },
          [t](const MixtureRuntime& d) {
            double acc = 0.0;
            for (const auto& [w, c] : d.components) acc += w * c.survival(t);
            return std::min(acc, 1.0);
          },
          [t](const TruncatedExtensionRuntime& d) {
            if (t >= d.atom) return 0.0;
            return d.base->survival(std::min(t, d.cut));
          },
      },
      *form_);
}

double RuntimeDistribution::completion_probability(double t) const {
  require_time(t, "completion_probability");
  return std::visit(
      overloaded{
          [t](const DiscreteRuntime& d) {
            const auto it = std::lower_bound(d.atoms.begin(), d.atoms.end(), t,
                                             [](const auto& a, double x) { return a.first < x; });
            if (it == d.atoms.begin()) return 0.0;
            return d.cumulative[static_cast<std::size_t>(it - d.atoms.begin()) - 1];
          },
          [this, t](const LogNormalRuntime&) { return cdf(t); },
          [this, t](const ParetoRuntime&) { return cdf(t); },
          [t](const MixtureRuntime& d) {
            double acc = 0.0;
            for (const auto& [w, c] : d.components) acc += w * c.completion_probability(t);
            return std::min(acc, 1.0);
          },
          [t](const TruncatedExtensionRuntime& d) {
            if (t > d.atom) return 1.0;
            if (t > d.cut) return d.base->cdf(d.cut);
            return d.base->completion_probability(t);
          },
      },
      *form_);
}

double RuntimeDistribution::support_min() const {
  return std::visit(overloaded{
                        [](const DiscreteRuntime& d) { return d.atoms.front().first; },
                        [](const LogNormalRuntime&) { return 0.0; },
                        [](const ParetoRuntime& d) { return d.x_min; },
                        [](const MixtureRuntime& d) {
                          double lo = kInfinity;
                          for (const auto& [w, c] : d.components) {
                            if (w > 0.0) lo = std::min(lo, c.support_min());
                          }
                          return lo;
                        },
                        [](const TruncatedExtensionRuntime& d) {
                          return d.base->cdf(d.cut) > 0.0 ? d.base->support_min() : d.atom;
                        },
                    },
                    *form_);
}

double RuntimeDistribution::support_max() const {
  return std::visit(overloaded{
                        [](const DiscreteRuntime& d) { return d.atoms.back().first; },
                        [](const LogNormalRuntime&) { return kInfinity; },
                        [](const ParetoRuntime&) { return kInfinity; },
                        [](const MixtureRuntime& d) {
                          double hi = 0.0;
                          for (const auto& [w, c] : d.components) {
                            if (w > 0.0) hi = std::max(hi, c.support_max());
                          }
                          return hi;
                        },
                        [](const TruncatedExtensionRuntime& d) {
                          return d.base->survival(d.cut) > 0.0 ? d.atom
                                                                : std::min(d.cut, d.base->support_max());
                        },
                    },
                    *form_);
}

bool RuntimeDistribution::is_discrete() const {
  return std::visit(overloaded{
                        [](const DiscreteRuntime&) { return true; },
                        [](const LogNormalRuntime&) { return false; },
                        [](const ParetoRuntime&) { return false; },
                        [](const MixtureRuntime& d) {
                          return std::all_of(d.components.begin(), d.components.end(),
                                             [](const auto& c) { return c.second.is_discrete(); });
                        },
                        [](const TruncatedExtensionRuntime& d) { return d.base->is_discrete(); },
                    },
                    *form_);
}

// ---------------------------------------------------------------- quantiles

double RuntimeDistribution::quantile(double p) const {
  require_probability(p, "quantile");
  if (p == 0.0) return support_min();
  if (p == 1.0) {
    const double hi = support_max();
    if (std::isinf(hi)) throw DomainError("quantile(1) of an unbounded distribution");
    return hi;
  }
  return std::visit(
      overloaded{
          [p](const DiscreteRuntime& d) {
            const auto it = std::lower_bound(d.cumulative.begin(), d.cumulative.end(), p);
            const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - d.cumulative.begin()),
                                                 d.atoms.size() - 1);
            return d.atoms[k].first;
          },
          [p](const LogNormalRuntime& d) { return std::exp(d.mu + d.sigma * std_normal_quantile(p)); },
          [p](const ParetoRuntime& d) { return d.x_min * std::pow(1.0 - p, -1.0 / d.shape); },
          [this, p](const MixtureRuntime&) {
            double lo = support_min();
            double hi = std::max(1.0, 2.0 * lo);
            while (cdf(hi) < p) {
              lo = hi;
              hi *= 2.0;
              if (!std::isfinite(hi)) throw NumericError("mixture quantile bracket overflow");
            }
            for (int iter = 0; iter < 400; ++iter) {
              const double mid = 0.5 * (lo + hi);
              if (mid <= lo || mid >= hi) break;
              if (cdf(mid) >= p) {
                hi = mid;
              } else {
                lo = mid;
              }
            }
            return hi;
          },
          [p](const TruncatedExtensionRuntime& d) {
            if (p <= d.base->cdf(d.cut)) return std::min(d.base->quantile(p), d.cut);
            return d.atom;
          },
      },
      *form_);
}

double RuntimeDistribution::sample_from_uniform(double v) const {
  if (!(v > 0.0 && v < 1.0)) throw DomainError("sample_from_uniform needs v in (0,1)");
  if (const auto* mix = std::get_if<MixtureRuntime>(form_.get())) {
    double acc = 0.0;
    for (std::size_t k = 0; k < mix->components.size(); ++k) {
      const auto& [w, c] = mix->components[k];
      const bool last = k + 1 == mix->components.size();
      if (w > 0.0 && (v < acc + w || last)) {
        const double rescaled = std::clamp((v - acc) / w, 0x1.0p-53, 1.0 - 0x1.0p-53);
        return c.sample_from_uniform(rescaled);
      }
      acc += w;
    }
  }
  return quantile(v);
}

// ---------------------------------------------------------------- integrals

double partial_expected_utility(const RuntimeDistribution& d, const UtilityFunction& u, double cap) {
  require_time(cap, "partial_expected_utility");
  const auto continuous = [&](const auto& quantile) {
    const double p_cap = std::isinf(cap) ? 1.0 : d.cdf(cap);
    const double p_hi = std::min(p_cap, kTopProbability);
    if (p_hi <= 0.0) return 0.0;
    std::vector<double> levels;
    for (double t : u.kinks()) levels.push_back(d.cdf(t));
    double integral = integrate_over_quantiles(quantile, [&u](double t) { return u(t); }, p_hi, levels);
    if (p_cap > p_hi && !std::isinf(cap)) integral += (p_cap - p_hi) * u(cap);
    return integral;
  };
  return std::visit(
      overloaded{
          [&](const DiscreteRuntime& dd) {
            double acc = 0.0;
            for (const auto& [t, p] : dd.atoms) {
              if (t > cap) break;
              acc += p * u(t);
            }
            return acc;
          },
          [&](const LogNormalRuntime& ln) {
            return continuous([&ln](double p) {
              return p <= 0.0 ? 0.0 : std::exp(ln.mu + ln.sigma * std_normal_quantile(p));
            });
          },
          [&](const ParetoRuntime& pa) {
            return continuous([&pa](double p) { return pa.x_min * std::pow(1.0 - p, -1.0 / pa.shape); });
          },
          [&](const MixtureRuntime& mix) {
            double acc = 0.0;
            for (const auto& [w, c] : mix.components) {
              if (w > 0.0) acc += w * partial_expected_utility(c, u, cap);
            }
            return acc;
          },
          [&](const TruncatedExtensionRuntime& te) {
            if (cap < te.atom) return partial_expected_utility(*te.base, u, std::min(cap, te.cut));
            return partial_expected_utility(*te.base, u, te.cut) + te.base->survival(te.cut) * u(te.atom);
          },
      },
      d.form());
}

double tail_term(const RuntimeDistribution& d, const UtilityFunction& u, double cap) {
  require_time(cap, "tail_term");
  if (std::isinf(cap)) return 0.0;
  return u(cap) * d.survival(cap);
}

double expected_utility(const RuntimeDistribution& d, const UtilityFunction& u, double cap) {
  require_time(cap, "expected_utility");
  return partial_expected_utility(d, u, cap) + tail_term(d, u, cap);
}

double expected_capped_runtime(const RuntimeDistribution& d, double cap) {
  require_time(cap, "expected_capped_runtime");
  if (std::isinf(cap)) throw DomainError("expected_capped_runtime needs a finite cap");
  return std::visit(
      overloaded{
          [&](const DiscreteRuntime& dd) {
            double acc = 0.0;
            for (const auto& [t, p] : dd.atoms) acc += p * std::min(t, cap);
            return acc;
          },
          [&](const LogNormalRuntime&) {
            const double p_hi = std::min(d.cdf(cap), kTopProbability);
            return integrate_over_quantiles([&d](double p) { return p <= 0.0 ? 0.0 : d.quantile(p); },
                                            [](double t) { return t; }, p_hi, {}) +
                   cap * d.survival(cap);
          },
          [&](const ParetoRuntime&) {
            const double p_hi = std::min(d.cdf(cap), kTopProbability);
            return integrate_over_quantiles([&d](double p) { return d.quantile(p); },
                                            [](double t) { return t; }, p_hi, {}) +
                   cap * d.survival(cap);
          },
          [&](const MixtureRuntime& mix) {
            double acc = 0.0;
            for (const auto& [w, c] : mix.components) {
              if (w > 0.0) acc += w * expected_capped_runtime(c, cap);
            }
            return acc;
          },
          [&](const TruncatedExtensionRuntime& te) {
            if (cap <= te.cut) return expected_capped_runtime(*te.base, cap);
            const double below = expected_capped_runtime(*te.base, te.cut) - te.cut * te.base->survival(te.cut);
            return below + te.base->survival(te.cut) * std::min(te.atom, cap);
          },
      },
      d.form());
}

double smallest_cap_with_tail_below(const RuntimeDistribution& d, const UtilityFunction& u,
                                    double threshold, bool strict, double tolerance) {
  const auto holds = [&](double kappa) {
    const double tail = tail_term(d, u, kappa);
    return strict ? tail < threshold : tail <= threshold;
  };
  if (holds(0.0)) return 0.0;

  if (const auto* disc = std::get_if<DiscreteRuntime>(&d.form())) {
    // On [left, right) the survival is constant, so only u varies.
    const auto& atoms = disc->atoms;
    for (std::size_t k = 0; k <= atoms.size(); ++k) {
      const double left = k == 0 ? 0.0 : atoms[k - 1].first;
      const double right = k == atoms.size() ? kInfinity : atoms[k].first;
      const double surv = k == 0 ? 1.0 : disc->upper_tail[k - 1];
      if (surv <= 0.0) {
        if (!strict || threshold > 0.0) return left;
        continue;
      }
      const double x = threshold / surv;
      if (x > 1.0 || (x == 1.0 && !strict)) return left;
      if (x < 0.0 || (x == 0.0 && strict)) continue;
      double candidate = std::max(left, u.inverse(x));
      if (candidate >= right) continue;
      if (!strict && !holds(candidate)) {
        candidate = std::nextafter(candidate, kInfinity);
        if (candidate >= right || !holds(candidate)) continue;
      }
      return candidate;
    }
    throw NumericError("tail term never falls below " + std::to_string(threshold));
  }

  double lo = 0.0;
  double hi = 1.0;
  while (!holds(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NumericError("tail term never falls below " + std::to_string(threshold));
  }
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (holds(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::string describe(const RuntimeDistribution& d) {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const DiscreteRuntime& dd) {
                   out << "discrete{";
                   for (std::size_t k = 0; k < dd.atoms.size(); ++k) {
                     if (k) out << ',';
                     out << '(' << csv::format_number(dd.atoms[k].first) << ','
                         << csv::format_number(dd.atoms[k].second) << ')';
                   }
                   out << '}';
                 },
                 [&](const LogNormalRuntime& ln) {
                   out << "lognormal(" << csv::format_number(ln.mu) << ',' << csv::format_number(ln.sigma)
                       << ')';
                 },
                 [&](const ParetoRuntime& pa) {
                   out << "pareto(" << csv::format_number(pa.x_min) << ',' << csv::format_number(pa.shape)
                       << ')';
                 },
                 [&](const MixtureRuntime& mix) {
                   out << "mixture{";
                   for (std::size_t k = 0; k < mix.components.size(); ++k) {
                     if (k) out << ',';
                     out << csv::format_number(mix.components[k].first) << '*'
                         << describe(mix.components[k].second);
                   }
                   out << '}';
                 },
                 [&](const TruncatedExtensionRuntime& te) {
                   out << "extension(" << describe(*te.base) << ",cut=" << csv::format_number(te.cut)
                       << ",atom=" << csv::format_number(te.atom) << ')';
                 },
             },
             d.form());
  return out.str();
}

}  // namespace utiliconf
