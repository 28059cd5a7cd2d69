#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "utiliconf/distributions.hpp"
#include "utiliconf/rng.hpp"

namespace testing {

// Random discrete distribution with 1..max_atoms atoms on a log-spread grid
// of runtimes in [0.5, 500]. Runtimes are rounded to 1/8 s so that ties with
// caps and utility breakpoints actually occur.
inline utiliconf::RuntimeDistribution random_discrete(utiliconf::KeyedStream& rng, int max_atoms = 6) {
  const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_atoms));
  std::set<double> times;
  while (static_cast<int>(times.size()) < k) {
    const double t = 0.5 * std::pow(1000.0, utiliconf::open_unit(rng));
    times.insert(std::max(0.125, std::round(t * 8.0) / 8.0));
  }
  std::vector<double> w;
  double total = 0.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    w.push_back(0.05 + utiliconf::open_unit(rng));
    total += w.back();
  }
  std::vector<std::pair<double, double>> atoms;
  double used = 0.0;
  std::size_t j = 0;
  for (double t : times) {
    const double p = j + 1 == times.size() ? 1.0 - used : w[j] / total;
    atoms.emplace_back(t, p);
    used += p;
    ++j;
  }
  return utiliconf::RuntimeDistribution::discrete(std::move(atoms));
}

}  // namespace testing
