#include <cmath>
#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "threshq/error.hpp"
#include "threshq/estimators.hpp"
#include "threshq/quality.hpp"
#include "threshq/windows.hpp"

using namespace threshq;
using doctest::Approx;

namespace {

double eval(const Estimator& e, std::vector<double> x) { return e(x); }

const Distribution kThree = Distribution::atoms({{0, 0.25}, {1, 0.35}, {10, 0.4}});

}  // namespace

TEST_CASE("threshold comparison snaps values next to delta onto the boundary") {
  CHECK(within_threshold(0.5, 0.75, false));
  CHECK_FALSE(within_threshold(0.75, 0.75, false));
  CHECK(within_threshold(0.75, 0.75, true));
  CHECK_FALSE(within_threshold(0.75 - 1e-15, 0.75, false));
  CHECK(within_threshold(0.75 + 1e-15, 0.75, true));
  CHECK_FALSE(within_threshold(0.8, 0.75, true));
}

TEST_CASE("sliding window over atoms") {
  const AtomWindow w = best_atom_window(kThree.finite_atoms(), 0.75);
  CHECK(w.first == 0);
  CHECK(w.last == 1);
  CHECK(w.mass == Approx(0.6));
  CHECK(w.center_lo == Approx(0.25));
  CHECK(w.center_hi == Approx(0.75));
  CHECK(w.center == Approx(0.5));
  // Leftmost of equal windows.
  const auto tie = Distribution::atoms({{0, 0.5}, {5, 0.5}});
  CHECK(best_atom_window(tie.finite_atoms(), 1.0).first == 0);
  // Open windows cannot hold atoms exactly 2 delta apart; closed ones can.
  const auto pair = Distribution::atoms({{0, 0.4}, {1, 0.6}});
  CHECK(best_atom_window(pair.finite_atoms(), 0.5).mass == Approx(0.6));
  CHECK(best_atom_window(pair.finite_atoms(), 0.5, {true, std::nullopt}).mass == Approx(1.0));
}

TEST_CASE("sliding window agrees with the anchored-window oracle") {
  for_all(200, 21, [](std::mt19937_64& rng, std::size_t) {
    const auto atoms = oracle::random_atoms(rng, 1 + rng() % 6, 30);
    std::vector<Atom> dbl;
    std::vector<Rational> locs;
    for (const auto& a : atoms) {
      dbl.push_back({to_double(a.loc), to_double(a.mass)});
      locs.push_back(a.loc);
    }
    const Rational delta(1 + static_cast<int>(rng() % 16), 8);
    const auto d = Distribution::atoms(dbl, locs);
    const AtomWindow w = best_atom_window(d.finite_atoms(), to_double(delta), {false, delta});
    CHECK(w.mass == to_double(oracle::s_bound_brute(atoms, delta)));
  });
}

TEST_CASE("one-sample window centers for continuous laws") {
  CHECK(unimodal_window_center(Distribution::gaussian(0, 1), 1.0) == Approx(0.0).scale(1).epsilon(1e-8));
  CHECK(unimodal_window_center(Distribution::gaussian(3, 2), 1.0) == Approx(3.0).epsilon(1e-8));
  CHECK(unimodal_window_center(Distribution::exponential(1), 0.25) == Approx(0.25).epsilon(1e-8));
  // Plateau: lowest optimal center.
  CHECK(unimodal_window_center(Distribution::uniform(0, 2), 0.5) == Approx(0.5).epsilon(1e-8));
  // Asymmetric triangle: window mass is maximal where the density matches at both ends.
  const auto tri = Distribution::piecewise({{0, 0}, {1, 2.0 / 3.0}, {3, 0}});
  const double c = unimodal_window_center(tri, 0.5);
  CHECK(pdf(tri, c - 0.5) == Approx(pdf(tri, c + 0.5)).epsilon(1e-8));
  // Oracle: brute-force scan of window masses.
  double best = 0.0;
  for (int i = 0; i <= 30000; ++i) best = std::max(best, window_mass(tri, i * 1e-4, 0.5));
  CHECK(window_mass(tri, c, 0.5) >= best - 1e-9);
}

TEST_CASE("mean estimator") {
  CHECK(eval(mean_estimator(Distribution::gaussian(0, 1)), {1.0, 3.0}) == Approx(2.0));
  CHECK(eval(mean_estimator(Distribution::gaussian(1, 1)), {1.0, 3.0}) == Approx(1.0));
  CHECK(eval(mean_estimator(Distribution::exponential(1)), {2.0}) == Approx(1.0));
}

TEST_CASE("window estimator examples") {
  CHECK(eval(window_mle_estimator(Distribution::gaussian(0, 1), 0.5), {0.0, 2.0}) == Approx(1.0).epsilon(1e-6));
  CHECK(eval(window_mle_estimator(Distribution::gaussian(3, 2), 1.0), {5.0}) == Approx(2.0).epsilon(1e-6));
  const auto e = window_mle_estimator(Distribution::gaussian(0, 1), 0.5);
  CHECK(eval(e, {0.5, -1.25, 3.0}) + 7.25 == Approx(eval(e, {7.75, 6.0, 10.25})).epsilon(1e-9));
  CHECK_THROWS_AS(window_mle_estimator(kThree, 0.5), Error);
  CHECK_THROWS_AS(
      window_mle_estimator(Distribution::piecewise({{0, 0}, {1, 0.5}, {2, 0.0}, {3, 0.5}, {4, 0}}), 0.5), Error);
}

TEST_CASE("window estimator matches the sample mean on Gaussian data") {
  for_all(1000, 31, [](std::mt19937_64& rng, std::size_t) {
    const double sigma = std::array{0.5, 1.0, 2.0}[rng() % 3];
    const double m = std::uniform_real_distribution<double>(-3, 3)(rng);
    const auto d = Distribution::gaussian(m, sigma);
    const std::size_t n = 1 + rng() % 8;
    std::normal_distribution<double> z(m + 5.0, sigma);
    std::vector<double> x(n);
    for (auto& xi : x) xi = z(rng);
    const double delta = std::uniform_real_distribution<double>(0.05, 2.0)(rng);
    CHECK(window_mle_estimator(d, delta)(x) == Approx(mean_estimator(d)(x)).epsilon(0).scale(1).epsilon(1e-6));
  });
}

TEST_CASE("window estimator for unimodal laws without log-concavity") {
  // Uniform with several samples: numeric search, optimality unverified.
  const auto u = Distribution::uniform(0, 1);
  const auto e = window_mle_estimator(u, 0.2);
  CHECK(e.accepts(3));
  CHECK(e.optimality().find("unverified") != std::string::npos);
  // Samples 0.3, 0.5, 0.9 give offsets (0, 0.2, 0.6); h = 1 exactly on t in [0, 0.4],
  // which the window of half width 0.2 covers only when centered at 0.2.
  CHECK(eval(e, {0.3, 0.5, 0.9}) == Approx(0.1).epsilon(1e-6));
}

TEST_CASE("min-shift estimator") {
  CHECK(eval(min_shift_estimator(0.5), {3.0}) == 2.5);
  CHECK(eval(min_shift_estimator(1.0), {2.0, 5.0, 3.0}) == 1.0);
  const auto e = min_shift_estimator(0.25);
  CHECK(eval(e, {1.5, 2.5}) + 4.0 == eval(e, {5.5, 6.5}));
}

TEST_CASE("discrete one-sample estimator") {
  const auto e = discrete_one_sample_estimator(kThree, 0.75);
  CHECK(eval(e, {10.5}) == Approx(10.0));
  CHECK(eval(discrete_one_sample_estimator(Distribution::atoms({{0, 1.0}}), 0.5), {4.25}) == Approx(4.25));
  for_all(100, 41, [&](std::mt19937_64& rng, std::size_t) {
    const double x = std::uniform_real_distribution<double>(-100, 100)(rng);
    const double c = std::uniform_real_distribution<double>(-1e3, 1e3)(rng);
    CHECK(eval(e, {x + c}) == Approx(eval(e, {x}) + c).epsilon(1e-12));
  });
}

TEST_CASE("discrete n-sample estimator") {
  const auto d = Distribution::atoms({{0, 0.4}, {1, 0.4}, {3, 0.2}});
  const auto e = discrete_n_sample_estimator(d, 0.6, 2);
  CHECK(eval(e, {5.0, 8.0}) == Approx(5.0));
  CHECK(eval(e, {4.0, 4.0}) == Approx(3.5));  // one-sample rule, c* = 0.5
  CHECK(eval(e, {5.0 + 2.5, 8.0 + 2.5}) == Approx(7.5));
  CHECK_THROWS_AS(eval(e, {0.0, 0.37}), Error);  // off the atom lattice
  CHECK_THROWS_AS(discrete_n_sample_estimator(Distribution::atoms({{0, 0.3}, {1, 0.3}, {2, 0.4}}), 0.6, 2), Error);

  // Exact recovery whenever two samples differ.
  const auto big = Distribution::atoms({{0, 0.2}, {1, 0.2}, {3, 0.2}, {7, 0.2}, {12, 0.2}});
  for (std::size_t n : {2, 3, 5}) {
    const auto en = discrete_n_sample_estimator(big, 0.4, n);
    std::size_t checked = 0;
    for_all(10000 / 3, 50 + n, [&](std::mt19937_64& rng, std::size_t i) {
      const double theta = std::uniform_real_distribution<double>(-50, 50)(rng);
      const auto x = sample(ShiftedDistribution{big, theta}, i, n);
      if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) return;
      ++checked;
      CHECK(en(x) == Approx(theta).epsilon(1e-12));
    });
    CHECK(checked > 1000);
  }
}

TEST_CASE("shift-invariant extension") {
  CHECK(eval(invariant_extension([](std::span<const double>) { return 0.0; }, 3), {2.0, 7.0, -1.0}) == 2.0);
  const double delta = 0.3;
  const auto ext = invariant_extension(
      [delta](std::span<const double> x0) { return -*std::min_element(x0.begin(), x0.end()) + delta; }, 4);
  const auto ms = min_shift_estimator(delta);
  for_all(1000, 61, [&](std::mt19937_64& rng, std::size_t) {
    std::uniform_real_distribution<double> u(-100, 100);
    std::vector<double> x(4);
    for (auto& v : x) v = u(rng);
    CHECK(ext(x) == Approx(ms(x)).epsilon(1e-12));
  });
  CHECK_THROWS_AS(eval(ext, {1.0}), Error);  // wrong sample count
}

TEST_CASE("shift invariance of every invariant estimator") {
  const auto g = Distribution::gaussian(0, 1);
  const auto tri = Distribution::piecewise({{-1, 0}, {0, 1}, {1, 0}});
  const auto atoms5 = Distribution::atoms({{0, 0.2}, {1, 0.2}, {3, 0.2}, {7, 0.2}, {12, 0.2}});
  struct Case {
    Estimator e;
    std::size_t n;
    const Distribution* sampler;  // inputs drawn from this law (atoms need lattice inputs)
  };
  std::vector<Case> cases = {
      {mean_estimator(g), 5, &g},
      {window_mle_estimator(g, 0.5), 4, &g},
      {window_mle_estimator(tri, 0.3), 3, &tri},
      {window_mle_estimator(Distribution::uniform(0, 1), 0.2), 1, nullptr},
      {window_mle_estimator(Distribution::exponential(1), 0.2), 1, nullptr},
      {min_shift_estimator(0.25), 6, &g},
      {discrete_one_sample_estimator(kThree, 0.75), 1, nullptr},
      {discrete_n_sample_estimator(atoms5, 0.4, 3), 3, &atoms5},
      {offset_estimator(mean_estimator(g), 2.5), 2, &g},
  };
  for (const auto& c : cases) {
    INFO(c.e.label());
    CHECK(c.e.invariance() == Invariance::ShiftInvariant);
    for_all(1000, 71, [&](std::mt19937_64& rng, std::size_t i) {
      const double cshift = std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
      std::vector<double> x = c.sampler ? sample(ShiftedDistribution{*c.sampler, 0.0}, i, c.n)
                                        : std::vector<double>{std::uniform_real_distribution<double>(-5, 5)(rng)};
      std::vector<double> y(x);
      for (auto& v : y) v += cshift;
      CHECK(std::abs(c.e(y) - c.e(x) - cshift) <= 1e-9 * std::max(1.0, std::abs(cshift) * 1e-6));
    });
  }
}

TEST_CASE("randomized estimators") {
  const auto g = Distribution::gaussian(0, 1);
  const auto m = mean_estimator(g);
  CHECK_THROWS_AS(mixture({}), Error);
  CHECK_THROWS_AS(mixture({{m, 0.5}, {m, 0.4}}), Error);
  CHECK_THROWS_AS(mixture({{m, 1.5}, {m, -0.5}}), Error);

  MCConfig mc;
  mc.trials = 200000;
  const RandomizedEstimator single(m);
  const Estimate q1 = quality_at(single, g, 1, 0.0, 1.0, mc);
  const Estimate q_one = quality_at(mixture({{m, 1.0}}), g, 1, 0.0, 1.0, mc);
  CHECK(q_one.q == q1.q);
  const Estimate q_two = quality_at(mixture({{m, 0.5}, {m, 0.5}}), g, 1, 0.0, 1.0, mc);
  CHECK(std::abs(q_two.q - q1.q) <= 3 * (q_two.ci_half_width + q1.ci_half_width));
  const Estimate q_far = quality_at(mixture({{m, 0.5}, {offset_estimator(m, 1000.0), 0.5}}), g, 1, 0.0, 1.0, mc);
  CHECK(std::abs(q_far.q - 0.5 * q1.q) <= 3 * (q_far.ci_half_width + 0.5 * q1.ci_half_width));
  CHECK(mixture({{m, 0.5}, {constant_estimator(0), 0.5}}).invariance() == Invariance::None);
}
