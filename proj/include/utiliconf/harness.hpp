#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "utiliconf/execution.hpp"
#include "utiliconf/procedures.hpp"
#include "utiliconf/report.hpp"
#include "utiliconf/utility.hpp"

namespace utiliconf {

enum class Procedure { Up, Naive, Oracle };

Procedure parse_procedure(const std::string& name);
std::string to_string(Procedure p);

struct ExperimentSpec {
  ExperimentSpec(RunSource source, UtilityFunction utility)
      : source(std::move(source)), utility(std::move(utility)) {}

  RunSource source;
  UtilityFunction utility;
  std::vector<Procedure> procedures{Procedure::Up};
  double delta = 0.1;
  std::vector<double> epsilons{0.1};
  std::vector<double> captimes;  // Naive only
  std::uint64_t seed = 1;
  std::size_t trials = 1;
  StopCriteria stop;
  bool free_oracle = false;
  std::size_t threads = 0;  // 0 = one per hardware thread
};

// Throws DomainError unless grids are strictly ascending, epsilons lie in
// (0,1], captimes are positive, delta in (0,1) and trials >= 1.
void validate(const ExperimentSpec& spec);

// Source for trial t. Every procedure in a trial sees the same instance stream.
std::uint64_t trial_seed(const ExperimentSpec& spec, std::size_t trial);
RunSource trial_source(const ExperimentSpec& spec, std::size_t trial);

// Exact U_i: integrals for synthetic sources, the population mean over all
// rows for a runtime matrix.
std::vector<double> exact_utilities(const RunSource& source, const UtilityFunction& u);
// Padding for epsilon-optimality checks against exact utilities (1e-12 when
// exact values are plain sums, 1e-7 when they come from quadrature).
double optimality_slack(const RunSource& source);

// Smallest m with theoretical_epsilon(n, m, delta) <= epsilon.
std::size_t up_rounds_for_epsilon(std::size_t n, double delta, double epsilon);
// Smallest m with 2 oracle_alpha(n, m, delta) <= epsilon.
std::size_t oracle_rounds_for_epsilon(std::size_t n, double delta, double epsilon);

// One procedure run (first procedure, first epsilon, first captime), trial 0.
// Per-arm rows; the event log is streamed to `events` when non-null.
Report run_once(const ExperimentSpec& spec, std::ostream* events = nullptr);

// Naive total simulated time over the (epsilon, captime) grid.
Report sweep_captime(const ExperimentSpec& spec);

// Total simulated time to reach each epsilon. UP and Oracle run once per trial
// and are read at the first round whose theoretical epsilon is <= epsilon;
// Naive runs once per (captime, epsilon).
Report sweep_epsilon(const ExperimentSpec& spec);

// UP read the same way as in sweep_epsilon, once per delta.
Report sweep_delta(const ExperimentSpec& spec, const std::vector<double>& deltas);

// Fraction of trials whose returned arm is epsilon-optimal, with a Wilson interval.
Report montecarlo_correctness(const ExperimentSpec& spec);

// Streams one JSON object per arm per round.
ProcedureObserver event_log_observer(std::ostream& out);

}  // namespace utiliconf
