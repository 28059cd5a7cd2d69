#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "utiliconf/distributions.hpp"

namespace utiliconf {

// Dataset of true runtimes: runtimes[i][k] is algorithm i on the k-th row of
// the file. All entries strictly positive and finite.
struct RuntimeMatrix {
  std::vector<std::string> algorithm_names;
  std::vector<std::string> instance_ids;
  std::vector<std::vector<double>> runtimes;

  std::size_t num_algorithms() const { return runtimes.size(); }
  std::size_t num_instances() const { return instance_ids.size(); }
};

// Parses `instance,<algo_1>,...,<algo_n>` CSV. Throws FormatError naming the
// row and column of missing, non-numeric or non-positive cells and ragged rows.
RuntimeMatrix load_runtime_matrix(const std::filesystem::path& path);
RuntimeMatrix parse_runtime_matrix(std::string_view text, const std::string& source_name = "<string>");

// Produces the true runtime t_ij of algorithm i on the j-th instance of a
// trial's stream. Procedures only ever see capped values through capped_run;
// the uncapped accessor exists for the runtime-oracle baseline.
class RunSource {
 public:
  // Instance order is a seeded permutation of the matrix rows.
  static RunSource matrix(std::shared_ptr<const RuntimeMatrix> data, std::uint64_t seed);
  // t_ij is drawn from distributions[i] with a stream keyed by (seed, i, j),
  // so re-running (i, j) always sees the same runtime.
  static RunSource synthetic(std::vector<RuntimeDistribution> distributions, std::uint64_t seed,
                             std::vector<std::string> names = {});

  // Same data, different trial seed.
  RunSource reseeded(std::uint64_t seed) const;

  std::size_t num_algorithms() const;
  // nullopt for synthetic sources, which never run out.
  std::optional<std::size_t> num_instances() const;
  const std::vector<std::string>& algorithm_names() const { return names_; }
  std::uint64_t seed() const { return seed_; }
  bool is_synthetic() const { return !matrix_; }
  // Empty for matrix sources.
  const std::vector<RuntimeDistribution>& distributions() const { return distributions_; }
  // Null for synthetic sources.
  const RuntimeMatrix* matrix_data() const { return matrix_.get(); }

  // Throws ExhaustedStreamError past the end of a matrix.
  double true_runtime(std::size_t algorithm, std::size_t instance) const;

 private:
  RunSource() = default;

  std::shared_ptr<const RuntimeMatrix> matrix_;
  std::vector<std::size_t> order_;
  std::vector<RuntimeDistribution> distributions_;
  std::vector<std::string> names_;
  std::uint64_t seed_ = 0;
};

// One capped observation t_ij(kappa) = min(t_ij, kappa). A run that reaches
// the cap exactly counts as capped.
struct RunRecord {
  std::size_t algorithm = 0;
  std::size_t instance = 0;
  double cap = 0.0;
  double observed = 0.0;
  bool completed = false;
};

// Simulated wall-clock spent on runs, per algorithm and in total.
class CostLedger {
 public:
  explicit CostLedger(std::size_t num_algorithms = 0, bool keep_history = false);

  void charge(std::size_t algorithm, double seconds);

  double total() const { return total_; }
  double algorithm_total(std::size_t algorithm) const { return per_algorithm_.at(algorithm); }
  const std::vector<double>& per_algorithm() const { return per_algorithm_; }
  std::size_t charge_count() const { return count_; }
  // Every charge in order; empty unless constructed with keep_history.
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> per_algorithm_;
  std::vector<double> history_;
  double total_ = 0.0;
  std::size_t count_ = 0;
  bool keep_history_ = false;
};

// Executes algorithm i on instance j with the given cap and charges the
// observed (capped) time.
RunRecord capped_run(const RunSource& src, std::size_t algorithm, std::size_t instance, double cap,
                     CostLedger& ledger);

struct SyncResult {
  std::span<const RunRecord> records;
  // True when the cap rose and every record was revisited.
  bool rebased = false;
  // Records [first_new, m) were executed for the first time in this call.
  std::size_t first_new = 0;
};

class RunCache;

// Brings algorithm i's records to instances 0..m-1 at `cap`. Completed
// records are reused for free; capped records from a lower cap are re-run
// from scratch at the new cap and charged again; new instances are run once.
// Throws DomainError if cap is below the algorithm's previous cap.
SyncResult sync_runs(const RunSource& src, std::size_t algorithm, std::size_t m, double cap,
                     RunCache& cache, CostLedger& ledger);

// Per-algorithm record store. All records of an algorithm share one cap.
class RunCache {
 public:
  explicit RunCache(std::size_t num_algorithms = 0) : arms_(num_algorithms) {}

  std::span<const RunRecord> records(std::size_t algorithm) const { return arms_.at(algorithm).records; }
  double cap(std::size_t algorithm) const { return arms_.at(algorithm).cap; }

 private:
  friend SyncResult sync_runs(const RunSource&, std::size_t, std::size_t, double, RunCache&,
                              CostLedger&);
  struct Arm {
    std::vector<RunRecord> records;
    double cap = 0.0;
  };
  std::vector<Arm> arms_;
};

}  // namespace utiliconf
