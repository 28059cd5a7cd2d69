#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "utiliconf/distributions.hpp"

namespace utiliconf {

struct NamedDistribution {
  std::string name;
  RuntimeDistribution distribution;
};

// Synthetic experiment description. JSON layout:
//
//   {
//     "name": "heavy-tail-5",                 (optional)
//     "utility": "loglaplace:60,1",           (optional default utility spec)
//     "algorithms": [
//       {"name": "a0", "distribution": <distribution>}, ...
//     ]
//   }
//
// where <distribution> is one of
//   {"type": "discrete", "atoms": [[t, p], ...]}
//   {"type": "lognormal", "mu": m, "sigma": s}
//   {"type": "pareto", "x_min": x, "shape": a}
//   {"type": "mixture", "components": [{"weight": w, "distribution": <distribution>}, ...]}
//   {"type": "truncated_extension", "base": <distribution>, "cut": c, "atom": a}
struct SyntheticSpec {
  std::string name;
  std::optional<std::string> utility;
  std::vector<NamedDistribution> algorithms;

  std::vector<RuntimeDistribution> distributions() const;
  std::vector<std::string> names() const;
};

nlohmann::json distribution_to_json(const RuntimeDistribution& d);
RuntimeDistribution distribution_from_json(const nlohmann::json& j);

nlohmann::json synthetic_spec_to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);

// Throws FormatError on unreadable files, JSON syntax errors and schema violations.
SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);
void save_synthetic_spec(const SyntheticSpec& spec, const std::filesystem::path& path);

}  // namespace utiliconf
