#include "utiliconf/harness.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "json.hpp"
#include "utiliconf/csv.hpp"
#include "utiliconf/distributions.hpp"
#include "utiliconf/errors.hpp"
#include "utiliconf/parallel.hpp"
#include "utiliconf/rng.hpp"
#include "utiliconf/stats.hpp"
#include "utiliconf/verification.hpp"

namespace utiliconf {
namespace {

Cell num(double x) { return x; }
Cell count(std::size_t k) { return static_cast<std::uint64_t>(k); }

void require_ascending(const std::vector<double>& grid, const char* what) {
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw DomainError(std::string(what) + " grid must be strictly ascending");
  }
}

std::string join(const std::vector<Procedure>& ps) {
  std::string out;
  for (auto p : ps) out += (out.empty() ? "" : ",") + to_string(p);
  return out;
}

std::vector<std::pair<std::string, Cell>> base_metadata(const ExperimentSpec& spec) {
  return {{"source", std::string(spec.source.is_synthetic() ? "synthetic" : "matrix")},
          {"algorithms", count(spec.source.num_algorithms())},
          {"utility", spec.utility.describe()},
          {"procedures", join(spec.procedures)},
          {"delta", num(spec.delta)},
          {"seed", Cell(spec.seed)},
          {"trials", count(spec.trials)},
          {"max_m", count(spec.stop.max_m)},
          {"budget_seconds", std::isinf(spec.stop.budget_seconds) ? Cell() : num(spec.stop.budget_seconds)},
          {"free_oracle", spec.free_oracle}};
}

// Smallest m >= 1 with f(m) <= target for a non-increasing f.
template <class F>
std::size_t first_round_below(F f, double target) {
  if (f(1) <= target) return 1;
  std::size_t lo = 1, hi = 2;
  while (!(f(hi) <= target)) {
    lo = hi;
    if (hi > (std::size_t{1} << 50)) throw InfeasibleInputsError("epsilon too small to be reached");
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (f(mid) <= target ? hi : lo) = mid;
  }
  return hi;
}

// Per-round record of an anytime run.
struct AnytimeTrace {
  ProcedureResult result;
  std::vector<double> total;  // total[m-1]
  std::vector<double> epsilon_hat;
  std::vector<std::size_t> leader;
};

AnytimeTrace run_anytime(Procedure p, const RunSource& src, const UtilityFunction& u, double delta,
                         const StopCriteria& stop, bool free_oracle) {
  AnytimeTrace trace;
  ProcedureObserver obs;
  obs.on_round = [&trace](const RoundSummary& s) {
    trace.total.push_back(s.total_seconds);
    trace.epsilon_hat.push_back(s.epsilon_hat);
    trace.leader.push_back(s.leader);
  };
  trace.result = p == Procedure::Up ? run_up(src, u, delta, stop, obs) : run_oracle(src, u, delta, stop, free_oracle, obs);
  return trace;
}

struct Reading {
  bool reached = false;
  std::size_t rounds = 0;
  std::size_t winner = 0;
  double total = 0.0;
  std::optional<double> epsilon_hat_time;
};

Reading read_at(const AnytimeTrace& trace, std::size_t rounds_needed, double epsilon) {
  Reading r;
  const auto& res = trace.result;
  if (rounds_needed <= res.rounds) {
    r.reached = true;
    r.rounds = rounds_needed;
    r.winner = trace.leader[rounds_needed - 1];
    r.total = trace.total[rounds_needed - 1];
  } else if (res.termination == Termination::SingleSurvivor) {
    r.reached = true;
    r.rounds = res.rounds;
    r.winner = res.winner;
    r.total = res.total_seconds;
  }
  for (std::size_t k = 0; k < trace.epsilon_hat.size(); ++k) {
    if (trace.epsilon_hat[k] <= epsilon) {
      r.epsilon_hat_time = trace.total[k];
      break;
    }
  }
  return r;
}

std::size_t rounds_for(Procedure p, std::size_t n, double delta, double epsilon) {
  return p == Procedure::Up ? up_rounds_for_epsilon(n, delta, epsilon) : oracle_rounds_for_epsilon(n, delta, epsilon);
}

std::string json_number(double x) { return std::isfinite(x) ? nlohmann::json(x).dump() : "null"; }

}  // namespace

Procedure parse_procedure(const std::string& name) {
  if (name == "up") return Procedure::Up;
  if (name == "naive") return Procedure::Naive;
  if (name == "oracle") return Procedure::Oracle;
  throw DomainError("unknown procedure '" + name + "' (expected up, naive or oracle)");
}

std::string to_string(Procedure p) {
  switch (p) {
    case Procedure::Up:
      return "up";
    case Procedure::Naive:
      return "naive";
    case Procedure::Oracle:
      return "oracle";
  }
  return "unknown";
}

void validate(const ExperimentSpec& spec) {
  if (!(spec.delta > 0.0 && spec.delta < 1.0)) throw DomainError("delta must lie in (0,1)");
  if (spec.trials == 0) throw DomainError("trials must be at least 1");
  if (spec.procedures.empty()) throw DomainError("no procedure selected");
  if (spec.epsilons.empty()) throw DomainError("epsilon grid is empty");
  require_ascending(spec.epsilons, "epsilon");
  require_ascending(spec.captimes, "captime");
  for (double e : spec.epsilons) {
    if (!(e > 0.0 && e <= 1.0)) throw DomainError("epsilon values must lie in (0,1]");
  }
  for (double k : spec.captimes) {
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("captimes must be positive and finite");
  }
  const bool naive = std::find(spec.procedures.begin(), spec.procedures.end(), Procedure::Naive) != spec.procedures.end();
  if (naive && spec.captimes.empty()) throw DomainError("naive needs a captime grid");
}

std::uint64_t trial_seed(const ExperimentSpec& spec, std::size_t trial) { return derive_seed(spec.seed, trial); }

RunSource trial_source(const ExperimentSpec& spec, std::size_t trial) {
  return spec.source.reseeded(trial_seed(spec, trial));
}

std::vector<double> exact_utilities(const RunSource& source, const UtilityFunction& u) {
  std::vector<double> out;
  if (const auto* m = source.matrix_data()) {
    for (const auto& column : m->runtimes) {
      CompensatedSum sum;
      for (double t : column) sum.add(u(t));
      out.push_back(sum.value() / static_cast<double>(column.size()));
    }
    return out;
  }
  for (const auto& d : source.distributions()) out.push_back(expected_utility(d, u));
  return out;
}

double optimality_slack(const RunSource& source) {
  if (source.matrix_data()) return 1e-12;
  return comparison_slack(source.distributions());
}

std::size_t up_rounds_for_epsilon(std::size_t n, double delta, double epsilon) {
  return first_round_below([&](std::size_t m) { return theoretical_epsilon(n, m, delta); }, epsilon);
}

std::size_t oracle_rounds_for_epsilon(std::size_t n, double delta, double epsilon) {
  return first_round_below([&](std::size_t m) { return 2.0 * oracle_alpha(n, m, delta); }, epsilon);
}

ProcedureObserver event_log_observer(std::ostream& out) {
  ProcedureObserver obs;
  obs.on_event = [&out](const RoundEvent& e) {
    out << "{\"m\":" << e.m << ",\"i\":" << e.algorithm << ",\"kappa_i\":" << json_number(e.cap)
        << ",\"U_hat\":" << json_number(e.utility_mean) << ",\"F_hat\":" << json_number(e.completion_fraction)
        << ",\"alpha\":" << json_number(e.alpha) << ",\"ucb\":" << json_number(e.ucb)
        << ",\"lcb\":" << json_number(e.lcb) << ",\"eliminated\":" << (e.eliminated ? "true" : "false")
        << ",\"doubled\":" << (e.doubled ? "true" : "false") << "}\n";
  };
  return obs;
}

Report run_once(const ExperimentSpec& spec, std::ostream* events) {
  validate(spec);
  const auto proc = spec.procedures.front();
  const auto src = trial_source(spec, 0);
  const auto& u = spec.utility;
  const ProcedureObserver obs = events ? event_log_observer(*events) : ProcedureObserver{};

  ProcedureResult res;
  switch (proc) {
    case Procedure::Up:
      res = run_up(src, u, spec.delta, spec.stop, obs);
      break;
    case Procedure::Oracle:
      res = run_oracle(src, u, spec.delta, spec.stop, spec.free_oracle, obs);
      break;
    case Procedure::Naive:
      res = run_naive(src, u, spec.epsilons.front(), spec.delta, spec.captimes.front(), obs);
      break;
  }
  const auto utilities = exact_utilities(src, u);
  const double best = *std::max_element(utilities.begin(), utilities.end());

  Report r;
  r.kind = "run";
  r.metadata = base_metadata(spec);
  r.metadata.emplace_back("procedure", to_string(proc));
  r.metadata.emplace_back("trial_seed", Cell(src.seed()));
  if (proc == Procedure::Naive) {
    r.metadata.emplace_back("epsilon", num(spec.epsilons.front()));
    r.metadata.emplace_back("captime", num(spec.captimes.front()));
  }
  r.metadata.emplace_back("winner", count(res.winner));
  r.metadata.emplace_back("winner_name", src.algorithm_names()[res.winner]);
  r.metadata.emplace_back("winner_gap", num(best - utilities[res.winner]));
  r.metadata.emplace_back("epsilon_hat", num(res.epsilon_hat_trace.back()));
  r.metadata.emplace_back("theoretical_epsilon", num(res.theoretical_epsilon));
  r.metadata.emplace_back("rounds", count(res.rounds));
  r.metadata.emplace_back("termination", to_string(res.termination));
  r.metadata.emplace_back("total_time", num(res.total_seconds));

  r.columns = {"algorithm", "name", "exact_utility", "gap", "samples", "max_cap", "seconds", "eliminated_at", "winner"};
  for (std::size_t i = 0; i < src.num_algorithms(); ++i) {
    Cell eliminated;
    for (const auto& e : res.eliminations) {
      if (e.algorithm == i) eliminated = count(e.m);
    }
    r.rows.push_back({count(i), src.algorithm_names()[i], num(utilities[i]), num(best - utilities[i]),
                      count(res.samples[i]), num(res.max_caps[i]), num(res.seconds_per_algorithm[i]), eliminated,
                      res.winner == i});
  }
  return r;
}

Report sweep_captime(const ExperimentSpec& spec) {
  validate(spec);
  if (spec.captimes.empty()) throw DomainError("sweep-captime needs a captime grid");
  const auto& u = spec.utility;
  struct Job {
    std::size_t trial;
    double epsilon, cap;
    bool feasible;
  };
  std::vector<Job> jobs;
  bool any_feasible = false;
  for (std::size_t t = 0; t < spec.trials; ++t) {
    for (double eps : spec.epsilons) {
      for (double cap : spec.captimes) {
        const bool feasible = u(cap) < eps;
        any_feasible = any_feasible || feasible;
        jobs.push_back({t, eps, cap, feasible});
      }
    }
  }
  if (!any_feasible) throw InfeasibleInputsError("every (epsilon, captime) pair has u(captime) >= epsilon");

  const auto rows = parallel_map(jobs.size(), spec.threads, [&](std::size_t k) {
    const auto& job = jobs[k];
    std::vector<Cell> row{count(job.trial), Cell(trial_seed(spec, job.trial)), num(job.epsilon), num(job.cap),
                          job.feasible};
    if (!job.feasible) {
      row.insert(row.end(), {Cell(), Cell(), Cell()});
      return row;
    }
    const auto res = run_naive(trial_source(spec, job.trial), u, job.epsilon, spec.delta, job.cap);
    row.insert(row.end(), {count(res.samples.front()), count(res.winner), num(res.total_seconds)});
    return row;
  });

  Report r;
  r.kind = "sweep-captime";
  r.metadata = base_metadata(spec);
  r.columns = {"trial", "seed", "epsilon", "kappa", "feasible", "samples_per_arm", "winner", "total_time"};
  r.rows = rows;
  r.chart = ChartSpec{"Naive: total simulated time vs captime", "kappa", "total_time", "epsilon", true,
                      "captime (s)", "total simulated time (s)"};
  return r;
}

Report sweep_epsilon(const ExperimentSpec& spec) {
  validate(spec);
  const auto& u = spec.utility;
  const std::size_t n = spec.source.num_algorithms();
  const double eps_min = spec.epsilons.front();

  struct Job {
    std::size_t trial;
    Procedure proc;
    double cap;  // Naive only
  };
  std::vector<Job> jobs;
  for (std::size_t t = 0; t < spec.trials; ++t) {
    for (auto p : spec.procedures) {
      if (p == Procedure::Naive) {
        for (double cap : spec.captimes) jobs.push_back({t, p, cap});
      } else {
        jobs.push_back({t, p, 0.0});
      }
    }
  }

  const auto blocks = parallel_map(jobs.size(), spec.threads, [&](std::size_t k) {
    const auto& job = jobs[k];
    const auto src = trial_source(spec, job.trial);
    const Cell trial = count(job.trial);
    const Cell seed = Cell(src.seed());
    std::vector<std::vector<Cell>> rows;
    if (job.proc == Procedure::Naive) {
      const std::string series = "naive@" + csv::format_number(job.cap);
      for (double eps : spec.epsilons) {
        std::vector<Cell> row{trial, seed, to_string(job.proc), series, num(job.cap), num(eps)};
        if (!(u(job.cap) < eps)) {
          row.insert(row.end(), {false, false, Cell(), Cell(), Cell(), Cell()});
        } else {
          const auto res = run_naive(src, u, eps, spec.delta, job.cap);
          row.insert(row.end(), {true, true, count(res.rounds), count(res.winner), num(res.total_seconds), Cell()});
        }
        rows.push_back(std::move(row));
      }
      return rows;
    }
    StopCriteria stop = spec.stop;
    stop.max_m = std::min(stop.max_m, rounds_for(job.proc, n, spec.delta, eps_min));
    const auto trace = run_anytime(job.proc, src, u, spec.delta, stop, spec.free_oracle);
    for (double eps : spec.epsilons) {
      const auto reading = read_at(trace, rounds_for(job.proc, n, spec.delta, eps), eps);
      std::vector<Cell> row{trial, seed, to_string(job.proc), to_string(job.proc), Cell(), num(eps), true,
                            reading.reached};
      if (reading.reached) {
        row.insert(row.end(), {count(reading.rounds), count(reading.winner), num(reading.total)});
      } else {
        row.insert(row.end(), {Cell(), Cell(), Cell()});
      }
      row.push_back(reading.epsilon_hat_time ? num(*reading.epsilon_hat_time) : Cell());
      rows.push_back(std::move(row));
    }
    return rows;
  });

  Report r;
  r.kind = "sweep-epsilon";
  r.metadata = base_metadata(spec);
  r.columns = {"trial", "seed", "procedure", "series", "kappa", "epsilon", "feasible", "reached",
               "rounds", "winner", "total_time", "epsilon_hat_time"};
  for (const auto& block : blocks) r.rows.insert(r.rows.end(), block.begin(), block.end());
  r.chart = ChartSpec{"Total simulated time to reach epsilon", "epsilon", "total_time", "series", true,
                      "epsilon", "total simulated time (s)"};
  return r;
}

Report sweep_delta(const ExperimentSpec& spec, const std::vector<double>& deltas) {
  validate(spec);
  if (deltas.empty()) throw DomainError("delta grid is empty");
  require_ascending(deltas, "delta");
  for (double d : deltas) {
    if (!(d > 0.0 && d < 1.0)) throw DomainError("delta values must lie in (0,1)");
  }
  const std::size_t n = spec.source.num_algorithms();
  struct Job {
    std::size_t trial;
    double delta;
  };
  std::vector<Job> jobs;
  for (std::size_t t = 0; t < spec.trials; ++t) {
    for (double d : deltas) jobs.push_back({t, d});
  }
  const auto blocks = parallel_map(jobs.size(), spec.threads, [&](std::size_t k) {
    const auto& job = jobs[k];
    const auto src = trial_source(spec, job.trial);
    StopCriteria stop = spec.stop;
    stop.max_m = std::min(stop.max_m, up_rounds_for_epsilon(n, job.delta, spec.epsilons.front()));
    const auto trace = run_anytime(Procedure::Up, src, spec.utility, job.delta, stop, false);
    std::vector<std::vector<Cell>> rows;
    for (double eps : spec.epsilons) {
      const auto reading = read_at(trace, up_rounds_for_epsilon(n, job.delta, eps), eps);
      std::vector<Cell> row{count(job.trial), Cell(src.seed()), num(job.delta), num(eps), reading.reached};
      if (reading.reached) {
        row.insert(row.end(), {count(reading.rounds), count(reading.winner), num(reading.total)});
      } else {
        row.insert(row.end(), {Cell(), Cell(), Cell()});
      }
      rows.push_back(std::move(row));
    }
    return rows;
  });
  Report r;
  r.kind = "sweep-delta";
  r.metadata = base_metadata(spec);
  r.columns = {"trial", "seed", "delta", "epsilon", "reached", "rounds", "winner", "total_time"};
  for (const auto& block : blocks) r.rows.insert(r.rows.end(), block.begin(), block.end());
  r.chart = ChartSpec{"UP: total simulated time to reach epsilon, by delta", "epsilon", "total_time", "delta", true,
                      "epsilon", "total simulated time (s)"};
  return r;
}

Report montecarlo_correctness(const ExperimentSpec& spec) {
  validate(spec);
  const auto& u = spec.utility;
  const auto utilities = exact_utilities(spec.source, u);
  const double best = *std::max_element(utilities.begin(), utilities.end());
  const double slack = optimality_slack(spec.source);

  struct Group {
    Procedure proc;
    double cap;       // Naive only
    double epsilon;   // Naive only; anytime procedures are scored on every epsilon
    bool feasible;
  };
  std::vector<Group> groups;
  bool any_feasible = false;
  for (auto p : spec.procedures) {
    if (p == Procedure::Naive) {
      for (double eps : spec.epsilons) {
        for (double cap : spec.captimes) {
          const bool feasible = u(cap) < eps;
          any_feasible = any_feasible || feasible;
          groups.push_back({p, cap, eps, feasible});
        }
      }
    } else {
      any_feasible = true;
      groups.push_back({p, 0.0, 0.0, true});
    }
  }
  if (!any_feasible) throw InfeasibleInputsError("every (epsilon, captime) pair has u(captime) >= epsilon");

  struct Outcome {
    std::size_t winner;
    double total;
    std::size_t rounds;
  };
  std::vector<std::pair<std::size_t, std::size_t>> jobs;  // (group, trial)
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (!groups[g].feasible) continue;
    for (std::size_t t = 0; t < spec.trials; ++t) jobs.emplace_back(g, t);
  }
  const auto outcomes = parallel_map(jobs.size(), spec.threads, [&](std::size_t k) {
    const auto& grp = groups[jobs[k].first];
    const auto src = trial_source(spec, jobs[k].second);
    ProcedureResult res;
    switch (grp.proc) {
      case Procedure::Up:
        res = run_up(src, u, spec.delta, spec.stop);
        break;
      case Procedure::Oracle:
        res = run_oracle(src, u, spec.delta, spec.stop, spec.free_oracle);
        break;
      case Procedure::Naive:
        res = run_naive(src, u, grp.epsilon, spec.delta, grp.cap);
        break;
    }
    return Outcome{res.winner, res.total_seconds, res.rounds};
  });

  Report r;
  r.kind = "montecarlo";
  r.metadata = base_metadata(spec);
  r.metadata.emplace_back("optimality_slack", num(slack));
  r.columns = {"procedure", "kappa", "epsilon", "feasible", "trials", "successes", "optimal_returned",
               "rate", "wilson_lower", "wilson_upper", "mean_total_time", "mean_rounds"};
  std::size_t cursor = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& grp = groups[g];
    const Cell cap = grp.proc == Procedure::Naive ? num(grp.cap) : Cell();
    if (!grp.feasible) {
      r.rows.push_back({to_string(grp.proc), cap, num(grp.epsilon), false, count(0), count(0), count(0), Cell(),
                        Cell(), Cell(), Cell(), Cell()});
      continue;
    }
    const std::span<const Outcome> mine(outcomes.data() + cursor, spec.trials);
    cursor += spec.trials;
    CompensatedSum time, rounds;
    std::size_t optimal = 0;
    for (const auto& o : mine) {
      time.add(o.total);
      rounds.add(static_cast<double>(o.rounds));
      if (best - utilities[o.winner] <= slack) ++optimal;
    }
    const auto scored = grp.proc == Procedure::Naive ? std::vector<double>{grp.epsilon} : spec.epsilons;
    for (double eps : scored) {
      std::size_t successes = 0;
      for (const auto& o : mine) {
        if (best - utilities[o.winner] <= eps + slack) ++successes;
      }
      const auto ci = wilson_interval(successes, spec.trials);
      const double tn = static_cast<double>(spec.trials);
      r.rows.push_back({to_string(grp.proc), cap, num(eps), true, count(spec.trials), count(successes),
                        count(optimal), num(ci.estimate), num(ci.lower), num(ci.upper), num(time.value() / tn),
                        num(rounds.value() / tn)});
    }
  }
  return r;
}

}  // namespace utiliconf
