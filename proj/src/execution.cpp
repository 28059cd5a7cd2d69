#include "utiliconf/execution.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <numeric>

#include "utiliconf/csv.hpp"
#include "utiliconf/errors.hpp"
#include "utiliconf/rng.hpp"

namespace utiliconf {

RuntimeMatrix parse_runtime_matrix(std::string_view text, const std::string& source_name) {
  const auto table = csv::parse(text, source_name);
  if (table.header.size() < 2 || table.header[0] != "instance") {
    throw FormatError(source_name + ": header must be 'instance,<algo_1>,...,<algo_n>'");
  }
  RuntimeMatrix out;
  out.algorithm_names.assign(table.header.begin() + 1, table.header.end());
  const std::size_t n = out.algorithm_names.size();
  out.runtimes.assign(n, {});
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = source_name + " row " + std::to_string(table.line_numbers[r]);
    if (row.size() != n + 1) {
      throw FormatError(where + ": expected " + std::to_string(n + 1) + " cells, found " +
                        std::to_string(row.size()));
    }
    if (row[0].empty()) throw FormatError(where + ": missing instance id");
    out.instance_ids.push_back(row[0]);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string cell = where + " column '" + out.algorithm_names[i] + "'";
      const double t = csv::parse_number(row[i + 1], cell);
      if (!(t > 0.0) || !std::isfinite(t)) {
        throw FormatError(cell + ": runtime must be strictly positive and finite, got '" + row[i + 1] + "'");
      }
      out.runtimes[i].push_back(t);
    }
  }
  if (out.instance_ids.empty()) throw FormatError(source_name + ": no instance rows");
  return out;
}

RuntimeMatrix load_runtime_matrix(const std::filesystem::path& path) {
  const auto table_text = [&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }();
  return parse_runtime_matrix(table_text, path.string());
}

// ---------------------------------------------------------------- RunSource

RunSource RunSource::matrix(std::shared_ptr<const RuntimeMatrix> data, std::uint64_t seed) {
  if (!data || data->num_algorithms() == 0) throw DomainError("empty runtime matrix");
  RunSource src;
  src.matrix_ = std::move(data);
  src.names_ = src.matrix_->algorithm_names;
  src.seed_ = seed;
  src.order_.resize(src.matrix_->num_instances());
  std::iota(src.order_.begin(), src.order_.end(), std::size_t{0});
  // Fisher-Yates with a keyed stream, so the order is identical across platforms.
  KeyedStream stream(seed, 0x5EEDULL, 0);
  for (std::size_t k = src.order_.size(); k > 1; --k) {
    const auto j = static_cast<std::size_t>(stream() % k);
    std::swap(src.order_[k - 1], src.order_[j]);
  }
  return src;
}

RunSource RunSource::synthetic(std::vector<RuntimeDistribution> distributions, std::uint64_t seed,
                               std::vector<std::string> names) {
  if (distributions.empty()) throw DomainError("synthetic source needs at least one distribution");
  if (names.empty()) {
    for (std::size_t i = 0; i < distributions.size(); ++i) names.push_back("a" + std::to_string(i));
  }
  if (names.size() != distributions.size()) throw DomainError("one name per distribution expected");
  RunSource src;
  src.distributions_ = std::move(distributions);
  src.names_ = std::move(names);
  src.seed_ = seed;
  return src;
}

RunSource RunSource::reseeded(std::uint64_t seed) const {
  if (matrix_) return matrix(matrix_, seed);
  return synthetic(distributions_, seed, names_);
}

std::size_t RunSource::num_algorithms() const { return names_.size(); }

std::optional<std::size_t> RunSource::num_instances() const {
  if (matrix_) return matrix_->num_instances();
  return std::nullopt;
}

double RunSource::true_runtime(std::size_t algorithm, std::size_t instance) const {
  if (algorithm >= num_algorithms()) throw DomainError("algorithm index out of range");
  if (matrix_) {
    if (instance >= order_.size()) {
      throw ExhaustedStreamError("instance " + std::to_string(instance) + " requested but the matrix has only " +
                                 std::to_string(order_.size()) + " instances");
    }
    return matrix_->runtimes[algorithm][order_[instance]];
  }
  KeyedStream stream(seed_, algorithm, instance);
  return distributions_[algorithm].sample(stream);
}

// ---------------------------------------------------------------- ledger

CostLedger::CostLedger(std::size_t num_algorithms, bool keep_history)
    : per_algorithm_(num_algorithms, 0.0), keep_history_(keep_history) {}

void CostLedger::charge(std::size_t algorithm, double seconds) {
  if (!(seconds >= 0.0) || !std::isfinite(seconds)) throw DomainError("ledger charge must be finite and >= 0");
  if (algorithm >= per_algorithm_.size()) per_algorithm_.resize(algorithm + 1, 0.0);
  per_algorithm_[algorithm] += seconds;
  total_ += seconds;
  ++count_;
  if (keep_history_) history_.push_back(seconds);
}

// ---------------------------------------------------------------- runs

RunRecord capped_run(const RunSource& src, std::size_t algorithm, std::size_t instance, double cap,
                     CostLedger& ledger) {
  if (!(cap > 0.0) || !std::isfinite(cap)) throw DomainError("captime must be positive and finite");
  const double t = src.true_runtime(algorithm, instance);
  RunRecord rec;
  rec.algorithm = algorithm;
  rec.instance = instance;
  rec.cap = cap;
  rec.completed = t < cap;
  rec.observed = rec.completed ? t : cap;
  ledger.charge(algorithm, rec.observed);
  return rec;
}

SyncResult sync_runs(const RunSource& src, std::size_t algorithm, std::size_t m, double cap,
                     RunCache& cache, CostLedger& ledger) {
  auto& arm = cache.arms_.at(algorithm);
  if (cap < arm.cap) {
    throw DomainError("captime for algorithm " + std::to_string(algorithm) + " decreased from " +
                      std::to_string(arm.cap) + " to " + std::to_string(cap));
  }
  SyncResult result;
  if (cap > arm.cap && !arm.records.empty()) {
    result.rebased = true;
    for (auto& rec : arm.records) {
      if (rec.completed) {
        rec.cap = cap;
      } else {
        rec = capped_run(src, algorithm, rec.instance, cap, ledger);
      }
    }
  }
  arm.cap = cap;
  result.first_new = arm.records.size();
  for (std::size_t j = arm.records.size(); j < m; ++j) {
    arm.records.push_back(capped_run(src, algorithm, j, cap, ledger));
  }
  result.records = std::span<const RunRecord>(arm.records.data(), std::min(m, arm.records.size()));
  return result;
}

}  // namespace utiliconf
