#include "utiliconf/procedures.hpp"

#include <algorithm>
#include <cmath>

#include "utiliconf/errors.hpp"

namespace utiliconf {
namespace {

void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0,1)");
}

// Matrix sources cannot supply more rounds than they have instances.
std::size_t effective_max_m(const RunSource& src, const StopCriteria& stop) {
  if (stop.max_m == 0) throw DomainError("max-m must be at least 1");
  const auto width = src.num_instances();
  return width ? std::min(stop.max_m, *width) : stop.max_m;
}

// Index into `candidates` of the largest key; ties go to the lowest algorithm
// index because candidates are kept sorted.
template <class Key>
std::size_t argmax(const std::vector<AlgorithmStats>& candidates, Key key) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < candidates.size(); ++k) {
    if (key(candidates[k]) > key(candidates[best])) best = k;
  }
  return best;
}

void emit(const ProcedureObserver& observer, const AlgorithmStats& s, bool eliminated, bool doubled) {
  if (!observer.on_event) return;
  observer.on_event(RoundEvent{s.m, s.algorithm, s.cap, s.utility_mean, s.completion_fraction, s.alpha,
                               s.ucb, s.lcb, eliminated, doubled});
}

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::SingleSurvivor:
      return "single-survivor";
    case Termination::Budget:
      return "budget";
    case Termination::MaxM:
      return "max-m";
    case Termination::FixedSamples:
      return "fixed-samples";
  }
  return "unknown";
}

// ---------------------------------------------------------------- oracle

ProcedureResult run_oracle(const RunSource& src, const UtilityFunction& u, double delta,
                           const StopCriteria& stop, bool free_oracle, const ProcedureObserver& observer) {
  require_delta(delta);
  const std::size_t n = src.num_algorithms();
  const std::size_t max_m = effective_max_m(src, stop);

  ProcedureResult result;
  result.procedure = "oracle";
  result.max_caps.assign(n, kInfinity);
  result.samples.assign(n, 0);

  CostLedger ledger(n);
  std::vector<CompensatedSum> sums(n);
  std::vector<std::size_t> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = i;

  for (std::size_t m = 1;; ++m) {
    const double alpha = oracle_alpha(n, m, delta);
    std::vector<AlgorithmStats> stats;
    stats.reserve(active.size());
    for (std::size_t i : active) {
      const double t = src.true_runtime(i, m - 1);
      ledger.charge(i, free_oracle ? 0.0 : t);
      sums[i].add(u(t));
      result.samples[i] = m;
      AlgorithmStats s;
      s.algorithm = i;
      s.m = m;
      s.cap = kInfinity;
      s.utility_mean = sums[i].value() / static_cast<double>(m);
      s.completion_fraction = 1.0;
      s.alpha = alpha;
      s.ucb = s.utility_mean + alpha;
      s.lcb = s.utility_mean - alpha;
      stats.push_back(s);
    }
    const auto& star = stats[argmax(stats, [](const AlgorithmStats& s) { return s.utility_mean; })];
    result.epsilon_hat_trace.push_back(anytime_epsilon(stats, star));

    std::vector<std::size_t> survivors;
    for (const auto& s : stats) {
      const bool eliminated = s.algorithm != star.algorithm && s.utility_mean < star.utility_mean - 2.0 * alpha;
      emit(observer, s, eliminated, false);
      if (eliminated) {
        result.eliminations.push_back({m, s.algorithm});
      } else {
        survivors.push_back(s.algorithm);
      }
    }
    active = std::move(survivors);

    result.winner = star.algorithm;
    result.rounds = m;
    result.theoretical_epsilon = 2.0 * alpha;
    if (observer.on_round) {
      observer.on_round(RoundSummary{m, star.algorithm, result.epsilon_hat_trace.back(), 2.0 * alpha,
                                     ledger.total(), active.size(), &result.max_caps});
    }
    if (active.size() == 1) {
      result.termination = Termination::SingleSurvivor;
      break;
    }
    if (m >= max_m) {
      result.termination = Termination::MaxM;
      break;
    }
    if (ledger.total() >= stop.budget_seconds) {
      result.termination = Termination::Budget;
      break;
    }
  }
  result.final_candidates = active;
  result.seconds_per_algorithm = ledger.per_algorithm();
  result.total_seconds = ledger.total();
  return result;
}

// ---------------------------------------------------------------- naive

std::size_t naive_sample_count(std::size_t n, double delta, double epsilon, double utility_at_cap) {
  require_delta(delta);
  if (n == 0) throw DomainError("naive needs at least one algorithm");
  if (!(utility_at_cap < epsilon)) {
    throw InfeasibleInputsError("naive needs u(kappa) < epsilon, got u(kappa) = " + std::to_string(utility_at_cap) +
                                " and epsilon = " + std::to_string(epsilon));
  }
  const double gap = epsilon - utility_at_cap;
  const double m = std::ceil(2.0 * std::log(2.0 * static_cast<double>(n) / delta) / (gap * gap));
  if (!(m < 1e15)) throw InfeasibleInputsError("naive sample count overflows");
  return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

ProcedureResult run_naive(const RunSource& src, const UtilityFunction& u, double epsilon, double delta,
                          double cap, const ProcedureObserver& observer) {
  const std::size_t n = src.num_algorithms();
  const double u_cap = u(cap);
  const std::size_t m = naive_sample_count(n, delta, epsilon, u_cap);

  ProcedureResult result;
  result.procedure = "naive";
  result.max_caps.assign(n, cap);
  result.samples.assign(n, m);

  CostLedger ledger(n);
  RunCache cache(n);
  const double radius = std::sqrt(std::log(2.0 * static_cast<double>(n) / delta) / (2.0 * static_cast<double>(m)));
  std::vector<AlgorithmStats> stats;
  for (std::size_t i = 0; i < n; ++i) {
    const auto sync = sync_runs(src, i, m, cap, cache, ledger);
    const auto est = empirical_stats(sync.records, u);
    AlgorithmStats s;
    s.algorithm = i;
    s.m = m;
    s.cap = cap;
    s.utility_mean = est.utility_mean;
    s.completion_fraction = est.completion_fraction;
    s.alpha = radius;
    const auto b = confidence_bounds(s, u);
    s.ucb = b.ucb;
    s.lcb = b.lcb;
    stats.push_back(s);
  }
  const auto& star = stats[argmax(stats, [](const AlgorithmStats& s) { return s.utility_mean; })];
  for (const auto& s : stats) emit(observer, s, false, false);

  result.winner = star.algorithm;
  result.final_candidates = {star.algorithm};
  result.epsilon_hat_trace.push_back(anytime_epsilon(stats, star));
  result.theoretical_epsilon = epsilon;
  result.rounds = m;
  result.termination = Termination::FixedSamples;
  result.seconds_per_algorithm = ledger.per_algorithm();
  result.total_seconds = ledger.total();
  if (observer.on_round) {
    observer.on_round(RoundSummary{m, star.algorithm, result.epsilon_hat_trace.back(), epsilon, ledger.total(), n,
                                   &result.max_caps});
  }
  return result;
}

// ---------------------------------------------------------------- UP

ProcedureResult run_up(const RunSource& src, const UtilityFunction& u, double delta, const StopCriteria& stop,
                       const ProcedureObserver& observer) {
  require_delta(delta);
  const std::size_t n = src.num_algorithms();
  const std::size_t max_m = effective_max_m(src, stop);

  ProcedureResult result;
  result.procedure = "up";
  result.max_caps.assign(n, 0.0);
  result.samples.assign(n, 0);

  CostLedger ledger(n);
  RunCache cache(n);
  std::vector<EmpiricalAccumulator> accumulators(n);
  std::vector<double> caps(n, 1.0);
  std::vector<std::size_t> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = i;

  std::vector<AlgorithmStats> stats;
  for (std::size_t m = 1;; ++m) {
    stats.clear();
    for (std::size_t i : active) {
      const auto sync = sync_runs(src, i, m, caps[i], cache, ledger);
      if (sync.rebased) {
        accumulators[i].rebuild(sync.records, u);
      } else {
        for (std::size_t j = sync.first_new; j < sync.records.size(); ++j) accumulators[i].add(sync.records[j], u);
      }
      const auto est = accumulators[i].estimate();
      result.max_caps[i] = std::max(result.max_caps[i], caps[i]);
      result.samples[i] = m;

      AlgorithmStats s;
      s.algorithm = i;
      s.m = m;
      s.cap = caps[i];
      s.utility_mean = est.utility_mean;
      s.completion_fraction = est.completion_fraction;
      s.alpha = up_alpha(n, m, caps[i], delta);
      const auto b = confidence_bounds(s, u);
      s.ucb = b.ucb;
      s.lcb = b.lcb;
      stats.push_back(s);
    }
    const AlgorithmStats star = stats[argmax(stats, [](const AlgorithmStats& s) { return s.lcb; })];
    result.epsilon_hat_trace.push_back(anytime_epsilon(stats, star));

    std::vector<std::size_t> survivors;
    for (const auto& s : stats) {
      const bool eliminated = s.ucb < star.lcb;
      const bool doubled = !eliminated && 2.0 * s.alpha <= u(s.cap) * (1.0 - s.completion_fraction);
      emit(observer, s, eliminated, doubled);
      if (eliminated) {
        result.eliminations.push_back({m, s.algorithm});
        continue;
      }
      if (doubled) caps[s.algorithm] *= 2.0;
      survivors.push_back(s.algorithm);
    }
    active = std::move(survivors);

    result.winner = star.algorithm;
    result.rounds = m;
    result.theoretical_epsilon = theoretical_epsilon(n, m, delta);
    if (observer.on_round) {
      observer.on_round(RoundSummary{m, star.algorithm, result.epsilon_hat_trace.back(), result.theoretical_epsilon,
                                     ledger.total(), active.size(), &result.max_caps});
    }
    if (active.size() == 1) {
      result.termination = Termination::SingleSurvivor;
      break;
    }
    if (m >= max_m) {
      result.termination = Termination::MaxM;
      break;
    }
    if (ledger.total() >= stop.budget_seconds) {
      result.termination = Termination::Budget;
      break;
    }
  }
  result.final_candidates = active;
  result.seconds_per_algorithm = ledger.per_algorithm();
  result.total_seconds = ledger.total();
  return result;
}

}  // namespace utiliconf
