#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "utiliconf/execution.hpp"
#include "utiliconf/stats.hpp"
#include "utiliconf/utility.hpp"

namespace utiliconf {

enum class Termination { SingleSurvivor, Budget, MaxM, FixedSamples };

std::string to_string(Termination t);

// Interrupt conditions, checked at round boundaries only.
struct StopCriteria {
  std::size_t max_m = 1'000'000;
  double budget_seconds = kInfinity;
};

// One arm in one round. cap is kInfinity for the runtime oracle.
struct RoundEvent {
  std::size_t m = 0;
  std::size_t algorithm = 0;
  double cap = 0.0;
  double utility_mean = 0.0;
  double completion_fraction = 0.0;
  double alpha = 0.0;
  double ucb = 0.0;
  double lcb = 0.0;
  bool eliminated = false;
  bool doubled = false;
};

// State after all eliminations and doublings of round m.
struct RoundSummary {
  std::size_t m = 0;
  std::size_t leader = 0;
  double epsilon_hat = 0.0;
  double theoretical_epsilon = 0.0;
  double total_seconds = 0.0;
  std::size_t survivors = 0;
  // Largest cap each algorithm has actually been run with so far.
  const std::vector<double>* max_caps = nullptr;
};

struct ProcedureObserver {
  std::function<void(const RoundEvent&)> on_event;
  std::function<void(const RoundSummary&)> on_round;
};

struct Elimination {
  std::size_t m = 0;
  std::size_t algorithm = 0;
};

struct ProcedureResult {
  std::string procedure;
  std::size_t winner = 0;
  std::vector<std::size_t> final_candidates;
  std::vector<Elimination> eliminations;
  // Anytime certified epsilon, one entry per round.
  std::vector<double> epsilon_hat_trace;
  // Guaranteed accuracy at termination (input epsilon for Naive).
  double theoretical_epsilon = 0.0;
  // Largest cap algorithm i was run with (kInfinity for the oracle).
  std::vector<double> max_caps;
  // Samples taken of each algorithm.
  std::vector<std::size_t> samples;
  std::vector<double> seconds_per_algorithm;
  double total_seconds = 0.0;
  std::size_t rounds = 0;
  Termination termination = Termination::SingleSurvivor;
};

// Successive elimination on uncapped runtimes. Runs are charged their full
// runtime unless free_oracle is set.
ProcedureResult run_oracle(const RunSource& src, const UtilityFunction& u, double delta,
                           const StopCriteria& stop = {}, bool free_oracle = false,
                           const ProcedureObserver& observer = {});

// ceil(2 ln(2n/delta) / (epsilon - u(cap))^2). Throws InfeasibleInputsError
// unless u(cap) < epsilon.
std::size_t naive_sample_count(std::size_t n, double delta, double epsilon, double utility_at_cap);

// Fixed-cap, fixed-sample procedure; returns the largest capped mean.
ProcedureResult run_naive(const RunSource& src, const UtilityFunction& u, double epsilon, double delta,
                          double cap, const ProcedureObserver& observer = {});

// Utilitarian procrastination: anytime elimination with per-arm cap doubling.
ProcedureResult run_up(const RunSource& src, const UtilityFunction& u, double delta,
                       const StopCriteria& stop = {}, const ProcedureObserver& observer = {});

}  // namespace utiliconf
