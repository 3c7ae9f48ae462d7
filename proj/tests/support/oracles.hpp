// Reference computations used by the tests. They are deliberately written
// without the library's algorithms: brute force, textbook formulas, plain
// quadrature.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "threshq/rational.hpp"

namespace oracle {

using threshq::Rational;

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Composite Simpson rule on [a, b] with m (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int m = 20000) {
  if (m % 2) ++m;
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

struct ExactAtom {
  Rational loc;
  Rational mass;
};

/// S_{mu,1} by trying every window that starts at an atom: a maximal window can
/// always be slid right until its open left end touches an atom.
inline Rational s_bound_brute(const std::vector<ExactAtom>& atoms, const Rational& delta) {
  Rational best = 0;
  for (const auto& lo : atoms) {
    Rational m = 0;
    for (const auto& a : atoms)
      if (a.loc >= lo.loc && a.loc - lo.loc < 2 * delta) m += a.mass;
    best = std::max(best, m);
  }
  return best;
}

/// T_{mu,1} by enumerating all 2^r atom subsets and keeping those in which no two
/// atoms differ by a nonzero integer multiple of 2 delta.
inline Rational t_bound_brute(const std::vector<ExactAtom>& atoms, const Rational& delta) {
  const std::size_t r = atoms.size();
  auto conflict = [&](std::size_t i, std::size_t j) {
    const Rational q = (atoms[j].loc - atoms[i].loc) / (2 * delta);
    return q != 0 && boost::multiprecision::denominator(q) == 1;
  };
  Rational best = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << r); ++mask) {
    bool ok = true;
    Rational m = 0;
    for (std::size_t i = 0; i < r && ok; ++i) {
      if (!(mask >> i & 1)) continue;
      m += atoms[i].mass;
      for (std::size_t j = i + 1; j < r && ok; ++j)
        if ((mask >> j & 1) && conflict(i, j)) ok = false;
    }
    if (ok) best = std::max(best, m);
  }
  return best;
}

/// Reduced words of length <= radius, found by reducing every string over {a, b, c}.
inline std::set<std::string> tree_ball_brute(std::size_t radius) {
  std::set<std::string> out;
  std::vector<std::string> all{""};
  for (std::size_t len = 1; len <= radius; ++len) {
    std::vector<std::string> next;
    for (const auto& w : all)
      if (w.size() == len - 1)
        for (char ch : {'a', 'b', 'c'}) next.push_back(w + ch);
    all.insert(all.end(), next.begin(), next.end());
  }
  for (const auto& w : all) {
    std::string red;
    for (char ch : w) {
      if (!red.empty() && red.back() == ch)
        red.pop_back();
      else
        red.push_back(ch);
    }
    if (red.size() <= radius) out.insert(red);
  }
  return out;
}

/// Random atom set with dyadic masses (multiples of 1/64) and locations on a
/// grid of step 1/4, so every quantity is exact in binary floating point too.
inline std::vector<ExactAtom> random_atoms(std::mt19937_64& rng, std::size_t r, int span = 40) {
  std::uniform_int_distribution<int> loc(0, span);
  std::set<int> used;
  while (used.size() < r) used.insert(loc(rng));
  std::vector<int> cuts;  // split 64 into r positive parts
  std::vector<int> pool(63);
  for (int i = 0; i < 63; ++i) pool[i] = i + 1;
  std::shuffle(pool.begin(), pool.end(), rng);
  cuts.assign(pool.begin(), pool.begin() + static_cast<long>(r) - 1);
  cuts.push_back(0);
  cuts.push_back(64);
  std::sort(cuts.begin(), cuts.end());
  std::vector<ExactAtom> out;
  std::size_t i = 0;
  for (int u : used) {
    out.push_back({Rational(u, 4), Rational(cuts[i + 1] - cuts[i], 64)});
    ++i;
  }
  return out;
}

}  // namespace oracle

/// Runs `prop(rng, case_index)` for `cases` random cases; the failing case index
/// is attached to any failure message.
template <class Prop>
void for_all(std::size_t cases, std::uint64_t seed, Prop&& prop) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < cases; ++i) {
    INFO("property case " << i << " (seed " << seed << ")");
    prop(rng, i);
  }
}
