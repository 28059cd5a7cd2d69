// Command-line front end: run, sweeps, Monte Carlo checks and verification.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "utiliconf/csv.hpp"
#include "utiliconf/errors.hpp"
#include "utiliconf/execution.hpp"
#include "utiliconf/harness.hpp"
#include "utiliconf/synthetic_spec.hpp"
#include "utiliconf/verification.hpp"

using namespace utiliconf;

namespace {

constexpr const char* kDefaultUtility = "loglaplace:60,1";

struct Options {
  std::vector<std::string> procedures{"up"};
  std::string dataset;
  std::string synthetic;
  std::string utility;
  double delta = 0.1;
  std::vector<double> epsilons;
  std::vector<double> captimes;
  std::vector<double> deltas;
  std::uint64_t seed = 1;
  std::size_t trials = 1;
  std::size_t max_m = 1'000'000;
  double budget_seconds = kInfinity;
  bool free_oracle = false;
  std::string out = ".";
  std::vector<std::string> formats{"csv", "json", "svg"};
  std::size_t threads = 0;
  std::string events;
  bool emit_witness = false;
};

void add_source_options(CLI::App* cmd, Options& o) {
  auto* ds = cmd->add_option("--dataset", o.dataset, "runtime matrix CSV (instance,<algo_1>,...)");
  auto* syn = cmd->add_option("--synthetic", o.synthetic, "synthetic spec JSON");
  ds->excludes(syn);
  cmd->add_option("--utility", o.utility, "loglaplace:<t0>[,<shape>] | uniform:<t0> | table:<csv>");
}

void add_common_options(CLI::App* cmd, Options& o, bool grids) {
  add_source_options(cmd, o);
  cmd->add_option("--procedure", o.procedures, "up, naive or oracle (comma-separated for sweeps)")
      ->delimiter(',');
  cmd->add_option("--delta", o.delta, "failure probability")->capture_default_str();
  cmd->add_option("--epsilon", o.epsilons, "epsilon grid, comma-separated")->delimiter(',');
  cmd->add_option("--captime", o.captimes, "captime grid in seconds, comma-separated")->delimiter(',');
  cmd->add_option("--seed", o.seed, "base seed")->capture_default_str();
  cmd->add_option("--max-m", o.max_m, "stop after this many rounds")->capture_default_str();
  cmd->add_option("--budget-seconds", o.budget_seconds, "stop once this much simulated time is spent");
  cmd->add_flag("--free-oracle", o.free_oracle, "do not charge the runtime oracle for its runs");
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--format", o.formats, "csv, json, svg (comma-separated)")->delimiter(',');
  cmd->add_option("--threads", o.threads, "worker threads, 0 = all cores")->capture_default_str();
  if (grids) cmd->add_option("--trials", o.trials, "number of seeded trials")->capture_default_str();
}

struct LoadedSource {
  RunSource source;
  UtilityFunction utility;
  std::optional<SyntheticSpec> spec;
};

LoadedSource load_source(const Options& o) {
  if (o.dataset.empty() == o.synthetic.empty()) throw DomainError("give exactly one of --dataset or --synthetic");
  std::string utility = o.utility;
  if (!o.dataset.empty()) {
    auto matrix = std::make_shared<const RuntimeMatrix>(load_runtime_matrix(o.dataset));
    if (utility.empty()) utility = kDefaultUtility;
    return {RunSource::matrix(matrix, o.seed), UtilityFunction::parse(utility), std::nullopt};
  }
  auto spec = load_synthetic_spec(o.synthetic);
  if (utility.empty()) utility = spec.utility.value_or(kDefaultUtility);
  return {RunSource::synthetic(spec.distributions(), o.seed, spec.names()), UtilityFunction::parse(utility), spec};
}

ExperimentSpec make_spec(const Options& o, LoadedSource& loaded) {
  ExperimentSpec spec(loaded.source, loaded.utility);
  spec.procedures.clear();
  for (const auto& p : o.procedures) spec.procedures.push_back(parse_procedure(p));
  spec.delta = o.delta;
  if (!o.epsilons.empty()) spec.epsilons = o.epsilons;
  spec.captimes = o.captimes;
  spec.seed = o.seed;
  spec.trials = o.trials;
  spec.stop.max_m = o.max_m;
  spec.stop.budget_seconds = o.budget_seconds;
  spec.free_oracle = o.free_oracle;
  spec.threads = o.threads;
  return spec;
}

std::vector<ReportFormat> formats(const Options& o) {
  std::vector<ReportFormat> out;
  for (const auto& f : o.formats) out.push_back(parse_report_format(f));
  return out;
}

void write(const Report& r, const Options& o, const std::string& stem) {
  for (const auto& path : emit_report(r, o.out, stem, formats(o))) std::cout << "wrote " << path.string() << "\n";
}

void print_metadata(const Report& r) {
  for (const auto& [key, value] : r.metadata) {
    std::cout << std::left << std::setw(22) << key;
    std::visit(
        [](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::monostate>) {
            std::cout << "-";
          } else if constexpr (std::is_same_v<T, bool>) {
            std::cout << (v ? "true" : "false");
          } else if constexpr (std::is_same_v<T, double>) {
            std::cout << csv::format_number(v);
          } else {
            std::cout << v;
          }
        },
        value);
    std::cout << "\n";
  }
}

int cmd_run(const Options& o) {
  auto loaded = load_source(o);
  auto spec = make_spec(o, loaded);
  std::ofstream events;
  if (!o.events.empty()) {
    events.open(o.events, std::ios::binary | std::ios::trunc);
    if (!events) throw std::runtime_error("cannot write " + o.events);
  }
  const auto r = run_once(spec, o.events.empty() ? nullptr : &events);
  print_metadata(r);
  write(r, o, "run");
  return 0;
}

// Always Naive; --procedure is ignored.
int cmd_sweep_captime(Options o) {
  o.procedures = {"naive"};
  auto loaded = load_source(o);
  const auto r = sweep_captime(make_spec(o, loaded));
  write(r, o, "sweep_captime");
  return 0;
}

int cmd_sweep_epsilon(const Options& o) {
  auto loaded = load_source(o);
  const auto r = sweep_epsilon(make_spec(o, loaded));
  write(r, o, "sweep_epsilon");
  return 0;
}

int cmd_sweep_delta(const Options& o) {
  if (o.deltas.empty()) throw DomainError("sweep-delta needs --deltas");
  auto loaded = load_source(o);
  const auto r = sweep_delta(make_spec(o, loaded), o.deltas);
  write(r, o, "sweep_delta");
  return 0;
}

int cmd_montecarlo(const Options& o) {
  auto loaded = load_source(o);
  const auto r = montecarlo_correctness(make_spec(o, loaded));
  std::cout << to_csv(r);
  write(r, o, "montecarlo");
  return 0;
}

int cmd_verify(const Options& o) {
  if (o.synthetic.empty()) throw DomainError("verify needs --synthetic");
  auto loaded = load_source(o);
  const auto& spec = *loaded.spec;
  const auto dists = spec.distributions();
  const auto names = spec.names();
  const auto& u = loaded.utility;
  if (o.epsilons.size() != 1) throw DomainError("verify needs exactly one --epsilon");
  const double eps = o.epsilons.front();

  VerificationReport rep = o.captimes.empty() ? run_verification(dists, u, eps)
                                              : check_captimes(dists, u, eps, o.captimes);

  Report r;
  r.kind = "verify";
  r.metadata = {{"utility", u.describe()},
                {"epsilon", eps},
                {"captimes", std::string(o.captimes.empty() ? "sufficient" : "given")},
                {"certified", rep.verdict.certified},
                {"winner", static_cast<std::uint64_t>(rep.verdict.winner)},
                {"winner_name", names[rep.verdict.winner]},
                {"margin", rep.verdict.margin},
                {"comparison_slack", rep.slack},
                {"winner_suboptimality", rep.winner_suboptimality}};
  r.columns = {"algorithm", "name", "exact_utility", "gap", "kappa", "lower", "upper", "tail"};
  std::cout << std::left << std::setw(4) << "i" << std::setw(16) << "name" << std::setw(14) << "kappa"
            << std::setw(14) << "LB" << std::setw(14) << "UB" << "U\n";
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const auto& v = rep.views[i];
    r.rows.push_back({static_cast<std::uint64_t>(i), names[i], rep.plan.utilities[i], rep.plan.gaps[i], v.cap,
                      v.lower, v.upper, v.upper - v.lower});
    std::cout << std::setw(4) << i << std::setw(16) << names[i] << std::setw(14) << csv::format_number(v.cap)
              << std::setw(14) << std::setprecision(8) << v.lower << std::setw(14) << v.upper
              << rep.plan.utilities[i] << "\n";
  }
  if (rep.verdict.certified) {
    std::cout << "certified: " << names[rep.verdict.winner] << " is " << csv::format_number(eps)
              << "-optimal (margin " << csv::format_number(rep.verdict.margin) << ")\n";
  } else {
    std::cout << "failed: upper bound of " << names[*rep.verdict.violator] << " exceeds the lower bound of "
              << names[rep.verdict.winner] << " by more than epsilon\n";
  }
  write(r, o, "verify");

  if (o.emit_witness) {
    if (rep.verdict.certified) {
      std::cout << "no witness: the check passed\n";
      return 0;
    }
    const std::size_t i = *rep.verdict.violator, star = rep.verdict.winner;
    const auto w = adversarial_extension(dists[i], rep.views[i], dists[star], rep.views[star], u, eps);
    // Keep the utility as the user wrote it; a table's description is not a parseable spec.
    SyntheticSpec out{spec.name + "-witness", o.utility.empty() ? spec.utility : std::optional(o.utility), {}};
    for (std::size_t k = 0; k < dists.size(); ++k) {
      const auto& d = k == i ? w.challenger_distribution : k == star ? w.incumbent_distribution : dists[k];
      out.algorithms.push_back({names[k], d});
    }
    const auto path = std::filesystem::path(o.out) / "witness.json";
    save_synthetic_spec(out, path);
    std::cout << "witness: U(" << names[i] << ") = " << csv::format_number(w.challenger_utility) << ", U("
              << names[star] << ") = " << csv::format_number(w.incumbent_utility) << "\n";
    std::cout << "wrote " << path.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Utilitarian algorithm configuration"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "run one procedure once and report per-arm results");
  add_common_options(run, o, false);
  run->add_option("--events", o.events, "write the per-round event log (JSON lines) here");

  auto* sc = app.add_subcommand("sweep-captime", "Naive total time over a captime grid");
  add_common_options(sc, o, true);

  auto* se = app.add_subcommand("sweep-epsilon", "total time to reach each epsilon, per procedure");
  add_common_options(se, o, true);

  auto* sd = app.add_subcommand("sweep-delta", "UP total time to reach each epsilon, per delta");
  add_common_options(sd, o, true);
  sd->add_option("--deltas", o.deltas, "delta grid, comma-separated")->delimiter(',');

  auto* mc = app.add_subcommand("montecarlo", "success rate of the returned arm over seeded trials");
  add_common_options(mc, o, true);

  auto* ve = app.add_subcommand("verify", "captime verification on a synthetic spec");
  add_source_options(ve, o);
  ve->add_option("--epsilon", o.epsilons, "target epsilon")->expected(1);
  ve->add_option("--captime", o.captimes, "use these caps instead of sufficient ones")->delimiter(',');
  ve->add_option("--out", o.out, "output directory")->capture_default_str();
  ve->add_option("--format", o.formats, "csv, json (comma-separated)")->delimiter(',');
  ve->add_flag("--emit-witness", o.emit_witness, "write the adversarial distributions as a spec JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(o);
    if (*sc) return cmd_sweep_captime(o);
    if (*se) return cmd_sweep_epsilon(o);
    if (*sd) return cmd_sweep_delta(o);
    if (*mc) return cmd_montecarlo(o);
    if (*ve) return cmd_verify(o);
  } catch (const InfeasibleInputsError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
