#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "utiliconf/csv.hpp"
#include "utiliconf/errors.hpp"
#include "utiliconf/harness.hpp"
#include "utiliconf/parallel.hpp"
#include "utiliconf/synthetic_spec.hpp"

using namespace utiliconf;

namespace {

SyntheticSpec small_family() {
  auto arm = [](double median, double w) {
    return RuntimeDistribution::mixture(
        {{1.0 - w, RuntimeDistribution::lognormal(std::log(median), 0.5)}, {w, RuntimeDistribution::pareto(600.0, 0.5)}});
  };
  return {"small", "loglaplace:60,1", {{"fast", arm(1.0, 0.01)}, {"slow", arm(4.0, 0.3)}}};
}

ExperimentSpec small_spec() {
  const auto family = small_family();
  ExperimentSpec spec(RunSource::synthetic(family.distributions(), 0, family.names()),
                      UtilityFunction::log_laplace(60.0));
  spec.seed = 7;
  spec.trials = 3;
  spec.threads = 3;
  return spec;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("csv and json carry the same table") {
  Report r;
  r.kind = "demo";
  r.metadata = {{"seed", Cell(std::uint64_t{3})}, {"note", std::string("plain")}};
  r.columns = {"a", "b", "c", "d"};
  r.rows = {{Cell(std::uint64_t{1}), Cell(0.1), Cell(true), Cell()},
            {Cell(std::uint64_t{2}), Cell(1e-300), Cell(false), Cell(std::string("x"))}};
  const auto table = csv::parse(to_csv(r));
  REQUIRE(table.header == r.columns);
  REQUIRE(table.rows.size() == 2);
  CHECK(csv::parse_number(table.rows[0][1], "b") == 0.1);
  CHECK(csv::parse_number(table.rows[1][1], "b") == 1e-300);
  CHECK(table.rows[0][3].empty());

  const auto j = nlohmann::json::parse(to_json(r));
  CHECK(j["kind"] == "demo");
  CHECK(j["rows"].size() == 2);
  CHECK(j["rows"][0]["b"].get<double>() == 0.1);
  CHECK(j["rows"][0]["d"].is_null());
  CHECK(j["rows"][1]["c"] == false);
  CHECK(j["metadata"]["seed"] == 3);
}

TEST_CASE("quoted csv fields") {
  Report r;
  r.columns = {"name"};
  r.rows = {{Cell(std::string("a,b"))}, {Cell(std::string("say \"hi\""))}};
  const auto text = to_csv(r);
  CHECK(text == "name\n\"a,b\"\n\"say \"\"hi\"\"\"\n");
}

TEST_CASE("svg is well formed") {
  Report r;
  r.columns = {"x", "y", "s"};
  r.rows = {{Cell(1.0), Cell(10.0), Cell(std::string("a"))},
            {Cell(2.0), Cell(100.0), Cell(std::string("a"))},
            {Cell(1.0), Cell(20.0), Cell(std::string("b"))},
            {Cell(2.0), Cell(), Cell(std::string("b"))}};
  r.chart = ChartSpec{"demo", "x", "y", "s", false, "x", "y"};
  const auto svg = to_svg(r);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("<svg ") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  std::size_t opened = 0, closed = 0;
  for (std::size_t p = 0; (p = svg.find("<g", p)) != std::string::npos; ++p) ++opened;
  for (std::size_t p = 0; (p = svg.find("</g>", p)) != std::string::npos; ++p) ++closed;
  CHECK(opened == closed);
}

TEST_CASE("parallel map keeps index order and rethrows") {
  const auto squares = parallel_map(100, 4, [](std::size_t k) { return k * k; });
  for (std::size_t k = 0; k < 100; ++k) CHECK(squares[k] == k * k);
  CHECK_THROWS_AS(parallel_map(10, 3,
                               [](std::size_t k) {
                                 if (k == 7) throw DomainError("boom");
                                 return k;
                               }),
                  DomainError);
}

TEST_CASE("sweeps are deterministic across thread counts") {
  auto spec = small_spec();
  spec.procedures = {Procedure::Up, Procedure::Naive};
  spec.epsilons = {0.2, 0.3};
  spec.captimes = {600.0, 2500.0};
  const auto a = sweep_epsilon(spec);
  spec.threads = 1;
  const auto b = sweep_epsilon(spec);
  CHECK(to_csv(a) == to_csv(b));
  CHECK(to_json(a) == to_json(b));

  const auto c = sweep_captime(spec);
  spec.threads = 4;
  CHECK(to_csv(sweep_captime(spec)) == to_csv(c));
}

TEST_CASE("paired trials see the same instance stream") {
  const auto spec = small_spec();
  const auto s0 = trial_source(spec, 1);
  const auto s1 = trial_source(spec, 1);
  CHECK(s0.true_runtime(0, 5) == s1.true_runtime(0, 5));
  CHECK(trial_seed(spec, 0) != trial_seed(spec, 1));
}

TEST_CASE("an all-infeasible grid is rejected") {
  auto spec = small_spec();
  spec.procedures = {Procedure::Naive};
  spec.epsilons = {0.1};
  spec.captimes = {60.0, 300.0};
  CHECK_THROWS_AS(sweep_captime(spec), InfeasibleInputsError);
  CHECK_THROWS_AS(montecarlo_correctness(spec), InfeasibleInputsError);
}

TEST_CASE("grid validation") {
  auto spec = small_spec();
  spec.epsilons = {0.2, 0.1};
  CHECK_THROWS_AS(validate(spec), DomainError);
  spec.epsilons = {0.1, 1.5};
  CHECK_THROWS_AS(validate(spec), DomainError);
  spec.epsilons = {0.1};
  spec.captimes = {0.0};
  CHECK_THROWS_AS(validate(spec), DomainError);
  spec.captimes = {};
  spec.delta = 1.0;
  CHECK_THROWS_AS(validate(spec), DomainError);
}

TEST_CASE("naive samples shrink as the captime grows") {
  // u(kappa) falls with kappa, so the required sample count does too.
  const auto u = UtilityFunction::log_laplace(60.0);
  std::size_t previous = naive_sample_count(5, 0.1, 0.1, u(350.0));
  for (double cap : {400.0, 600.0, 1000.0, 5000.0, 100000.0}) {
    const auto m = naive_sample_count(5, 0.1, 0.1, u(cap));
    CHECK(m < previous);
    previous = m;
  }
}

TEST_CASE("rounds needed for epsilon") {
  const std::size_t m = up_rounds_for_epsilon(5, 0.1, 0.1);
  CHECK(theoretical_epsilon(5, m, 0.1) <= 0.1);
  CHECK(theoretical_epsilon(5, m - 1, 0.1) > 0.1);
  const std::size_t k = oracle_rounds_for_epsilon(5, 0.1, 0.1);
  CHECK(2.0 * oracle_alpha(5, k, 0.1) <= 0.1);
  CHECK(2.0 * oracle_alpha(5, k - 1, 0.1) > 0.1);
}

TEST_CASE("run report and event log") {
  auto spec = small_spec();
  spec.stop.max_m = 200;
  std::ostringstream events;
  const auto r = run_once(spec, &events);
  CHECK(r.rows.size() == 2);
  std::istringstream lines(events.str());
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("alpha"));
    CHECK(j.contains("doubled"));
    ++count;
  }
  CHECK(count >= 2);
}

TEST_CASE("montecarlo report counts every trial") {
  auto spec = small_spec();
  spec.procedures = {Procedure::Naive};
  spec.epsilons = {0.2};
  spec.captimes = {60.0, 600.0};
  const auto r = montecarlo_correctness(spec);
  REQUIRE(r.rows.size() == 2);
  CHECK(std::get<bool>(r.rows[0][r.column("feasible")]) == false);
  CHECK(std::get<std::uint64_t>(r.rows[1][r.column("trials")]) == 3);
}

TEST_CASE("synthetic spec round trip") {
  const auto spec = small_family();
  const auto back = synthetic_spec_from_json(synthetic_spec_to_json(spec));
  CHECK(back.name == spec.name);
  CHECK(back.utility == spec.utility);
  CHECK(back.names() == spec.names());
  const auto u = UtilityFunction::log_laplace(60.0);
  for (std::size_t i = 0; i < spec.algorithms.size(); ++i) {
    CHECK(expected_utility(back.algorithms[i].distribution, u) ==
          expected_utility(spec.algorithms[i].distribution, u));
  }
  CHECK_THROWS_AS(synthetic_spec_from_json(nlohmann::json::parse(R"({"algorithms": []})")), FormatError);
  CHECK_THROWS_AS(synthetic_spec_from_json(nlohmann::json::parse(
                      R"({"algorithms": [{"name": "a", "distribution": {"type": "cubic"}}]})")),
                  FormatError);
}

TEST_CASE("shipped family loads") {
  const auto spec = load_synthetic_spec(std::filesystem::path(UTILICONF_DATA_DIR) / "synthetic_family.json");
  CHECK(spec.algorithms.size() == 5);
  const auto u = UtilityFunction::log_laplace(60.0);
  const double best = expected_utility(spec.algorithms[0].distribution, u);
  const double gaps[] = {0.0, 0.05, 0.1, 0.2, 0.4};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(best - expected_utility(spec.algorithms[i].distribution, u) == doctest::Approx(gaps[i]).epsilon(1e-8));
  }
}

}
