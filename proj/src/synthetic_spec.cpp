#include "utiliconf/synthetic_spec.hpp"

#include <fstream>

#include "utiliconf/errors.hpp"

namespace utiliconf {
namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double number_field(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw FormatError(std::string("distribution field '") + key + "' missing or not a number");
  }
  return j.at(key).get<double>();
}

}  // namespace

json distribution_to_json(const RuntimeDistribution& d) {
  return std::visit(overloaded{
                        [](const DiscreteRuntime& dd) {
                          json atoms = json::array();
                          for (const auto& [t, p] : dd.atoms) atoms.push_back({t, p});
                          return json{{"type", "discrete"}, {"atoms", atoms}};
                        },
                        [](const LogNormalRuntime& ln) {
                          return json{{"type", "lognormal"}, {"mu", ln.mu}, {"sigma", ln.sigma}};
                        },
                        [](const ParetoRuntime& pa) {
                          return json{{"type", "pareto"}, {"x_min", pa.x_min}, {"shape", pa.shape}};
                        },
                        [](const MixtureRuntime& mix) {
                          json comps = json::array();
                          for (const auto& [w, c] : mix.components) {
                            comps.push_back({{"weight", w}, {"distribution", distribution_to_json(c)}});
                          }
                          return json{{"type", "mixture"}, {"components", comps}};
                        },
                        [](const TruncatedExtensionRuntime& te) {
                          return json{{"type", "truncated_extension"},
                                      {"base", distribution_to_json(*te.base)},
                                      {"cut", te.cut},
                                      {"atom", te.atom}};
                        },
                    },
                    d.form());
}

RuntimeDistribution distribution_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw FormatError("distribution must be an object with a string 'type'");
  }
  const auto type = j.at("type").get<std::string>();
  try {
    if (type == "discrete") {
      std::vector<std::pair<double, double>> atoms;
      for (const auto& a : j.at("atoms")) {
        if (!a.is_array() || a.size() != 2) throw FormatError("discrete atoms must be [t, p] pairs");
        atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
      }
      return RuntimeDistribution::discrete(std::move(atoms));
    }
    if (type == "lognormal") return RuntimeDistribution::lognormal(number_field(j, "mu"), number_field(j, "sigma"));
    if (type == "pareto") return RuntimeDistribution::pareto(number_field(j, "x_min"), number_field(j, "shape"));
    if (type == "mixture") {
      std::vector<std::pair<double, RuntimeDistribution>> comps;
      for (const auto& c : j.at("components")) {
        comps.emplace_back(number_field(c, "weight"), distribution_from_json(c.at("distribution")));
      }
      return RuntimeDistribution::mixture(std::move(comps));
    }
    if (type == "truncated_extension") {
      return RuntimeDistribution::truncated_extension(distribution_from_json(j.at("base")),
                                                      number_field(j, "cut"), number_field(j, "atom"));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad '") + type + "' distribution: " + e.what());
  } catch (const DomainError& e) {
    throw FormatError(std::string("bad '") + type + "' distribution: " + e.what());
  }
  throw FormatError("unknown distribution type '" + type + "'");
}

std::vector<RuntimeDistribution> SyntheticSpec::distributions() const {
  std::vector<RuntimeDistribution> out;
  out.reserve(algorithms.size());
  for (const auto& a : algorithms) out.push_back(a.distribution);
  return out;
}

std::vector<std::string> SyntheticSpec::names() const {
  std::vector<std::string> out;
  out.reserve(algorithms.size());
  for (const auto& a : algorithms) out.push_back(a.name);
  return out;
}

json synthetic_spec_to_json(const SyntheticSpec& spec) {
  json algos = json::array();
  for (const auto& a : spec.algorithms) {
    algos.push_back({{"name", a.name}, {"distribution", distribution_to_json(a.distribution)}});
  }
  json out{{"name", spec.name}, {"algorithms", algos}};
  if (spec.utility) out["utility"] = *spec.utility;
  return out;
}

SyntheticSpec synthetic_spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("algorithms") || !j.at("algorithms").is_array()) {
    throw FormatError("synthetic spec needs an 'algorithms' array");
  }
  SyntheticSpec spec;
  if (j.contains("name")) spec.name = j.at("name").get<std::string>();
  if (j.contains("utility")) spec.utility = j.at("utility").get<std::string>();
  std::size_t index = 0;
  for (const auto& a : j.at("algorithms")) {
    if (!a.contains("distribution")) {
      throw FormatError("algorithm " + std::to_string(index) + " has no 'distribution'");
    }
    std::string name = a.contains("name") ? a.at("name").get<std::string>() : "a" + std::to_string(index);
    spec.algorithms.push_back({std::move(name), distribution_from_json(a.at("distribution"))});
    ++index;
  }
  if (spec.algorithms.empty()) throw FormatError("synthetic spec lists no algorithms");
  return spec;
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return synthetic_spec_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_synthetic_spec(const SyntheticSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << synthetic_spec_to_json(spec).dump(2) << '\n';
}

}  // namespace utiliconf
