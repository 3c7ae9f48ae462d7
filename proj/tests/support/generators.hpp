// Random inputs shared by the property tests and the acceptance binary.
#pragma once

#include <map>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "threshq/distributions.hpp"
#include "threshq/estimators.hpp"

namespace gen {

using threshq::Rational;

/// Atom law with exact locations (for exact window and lattice arithmetic).
inline threshq::Distribution exact_atoms(const std::vector<oracle::ExactAtom>& atoms) {
  std::vector<threshq::Atom> dbl;
  std::vector<Rational> locs;
  for (const auto& a : atoms) {
    dbl.push_back({threshq::to_double(a.loc), threshq::to_double(a.mass)});
    locs.push_back(a.loc);
  }
  return threshq::Distribution::atoms(std::move(dbl), std::move(locs));
}

/// One-sample estimator given by a random lookup table on `points` (the values the
/// sample can take). Each entry guesses x - z for a random atom z (a plausible
/// guess), or an arbitrary nearby value. Points outside the table map to 0.
inline threshq::Estimator random_table_estimator(std::mt19937_64& rng, const std::vector<double>& points,
                                                 const std::vector<double>& atom_locations) {
  std::map<double, double> table;
  std::uniform_real_distribution<double> noise(-3.0, 3.0);
  for (double p : points) {
    if (rng() % 4 == 0)
      table[p] = p + noise(rng);
    else
      table[p] = p - atom_locations[rng() % atom_locations.size()];
  }
  return threshq::Estimator("random table", threshq::Invariance::None, 1,
                            [table = std::move(table)](std::span<const double> x) {
                              auto it = table.lower_bound(x[0] - 1e-9);
                              if (it != table.end() && std::abs(it->first - x[0]) <= 1e-9) return it->second;
                              return 0.0;
                            });
}

}  // namespace gen
