#include <cmath>
#include <random>
#include <set>

#include <doctest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "threshq/bounds.hpp"
#include "threshq/error.hpp"

using namespace threshq;
using doctest::Approx;

namespace {

MCConfig mc_with(std::uint64_t trials, std::uint64_t seed = 42) {
  MCConfig mc;
  mc.trials = trials;
  mc.seed = seed;
  return mc;
}

const Distribution kThree = Distribution::atoms({{0, 0.25}, {1, 0.35}, {10, 0.4}});

}  // namespace

TEST_CASE("S for one sample") {
  const BoundReport g = s_bound_one_sample(Distribution::gaussian(0, 1), 1.0);
  CHECK(g.value == Approx(2 * oracle::normal_cdf(1.0) - 1).epsilon(1e-9));
  REQUIRE(g.witness_center);
  CHECK(*g.witness_center == Approx(0.0).scale(1).epsilon(1e-8));
  CHECK(g.s_equals_t_certified);

  const BoundReport e = s_bound_one_sample(Distribution::exponential(1), 0.25);
  CHECK(e.value == Approx(1 - std::exp(-0.5)).epsilon(1e-9));
  CHECK(*e.witness_center == Approx(0.25).epsilon(1e-8));

  const BoundReport a = s_bound_one_sample(kThree, 0.75);
  CHECK(a.value == Approx(0.6));
  CHECK(a.witness_atoms == std::vector<std::size_t>{0, 1});

  // Generic continuous law: bimodal table, compared with a fine scan of window masses.
  const auto bi = Distribution::piecewise({{0, 0}, {1, 0.6}, {2, 0.0}, {3, 0.4}, {4, 0}});
  const BoundReport b = s_bound_one_sample(bi, 0.4);
  double best = 0.0;
  for (int i = 0; i <= 40000; ++i) {
    const double c = i * 1e-4;
    best = std::max(best, cdf(bi, c + 0.4) - cdf(bi, c - 0.4));
  }
  CHECK(b.value == Approx(best).epsilon(1e-7));
  CHECK(b.value >= best - 1e-12);
}

TEST_CASE("T for one sample from atoms") {
  CHECK(t_bound_one_sample_discrete(Distribution::atoms({{0, 0.4}, {1, 0.6}}), 0.5).value == Approx(0.6));
  CHECK(t_bound_one_sample_discrete(Distribution::atoms({{0, 0.4}, {0.9, 0.6}}), 0.5).value == Approx(1.0));
  CHECK(t_bound_one_sample_discrete(Distribution::atoms({{4, 1.0}}), 0.5).value == 1.0);
  const BoundReport t = t_bound_one_sample_discrete(kThree, 0.75);  // 1 and 10 differ by 6 * 2 delta
  CHECK(t.value == Approx(0.65));
  CHECK_FALSE(t_bound_one_sample_discrete(kThree, 0.75, {true, std::nullopt}).available);
}

TEST_CASE("T matches brute force over all atom subsets") {
  for_all(60, 101, [](std::mt19937_64& rng, std::size_t) {
    const std::size_t r = 1 + rng() % 12;
    const auto atoms = oracle::random_atoms(rng, r, 24);
    const Rational delta(1 + static_cast<int>(rng() % 6), 8);  // 2 delta in {1/4, ..., 3/2}: many conflicts
    const auto d = gen::exact_atoms(atoms);
    const BoundReport exact = t_bound_one_sample_discrete(d, to_double(delta), {false, delta});
    const BoundReport floating = t_bound_one_sample_discrete(d, to_double(delta));
    const double brute = to_double(oracle::t_bound_brute(atoms, delta));
    CHECK(exact.value == brute);
    CHECK(floating.value == Approx(brute).epsilon(1e-12));
  });
}

TEST_CASE("S never exceeds T on random atom sets") {
  for_all(25, 111, [](std::mt19937_64& rng, std::size_t) {
    const auto atoms = oracle::random_atoms(rng, 1 + rng() % 5, 16);
    const Rational delta(1 + static_cast<int>(rng() % 12), 8);
    const auto d = gen::exact_atoms(atoms);
    const WindowOptions opts{false, delta};
    const BoundReport s = s_bound_one_sample(d, to_double(delta), opts);
    const BoundReport t = t_bound_one_sample_discrete(d, to_double(delta), opts);
    CHECK(s.value <= t.value + 1e-12);
    CHECK(s.value == to_double(oracle::s_bound_brute(atoms, delta)));
  });
}

TEST_CASE("T for half-line monotone laws") {
  const auto ex = Distribution::exponential(1);
  CHECK(t_bound_min_family(ex, 1, 0.25).value == Approx(1 - std::exp(-0.5)).epsilon(1e-12));
  CHECK(t_bound_min_family(ex, 5, 0.25).value == Approx(1 - std::exp(-2.5)).epsilon(1e-12));
  CHECK(t_bound_min_family(ex, 3, 400.0).value == 1.0);
  CHECK(t_bound_min_family(ex, 2, 0.25).s_equals_t_certified);
  CHECK_THROWS_AS(t_bound_min_family(Distribution::gaussian(0, 1), 1, 0.25), Error);

  // Oracle: mu^n of B = {x : min x < 2 delta} by direct simulation.
  std::mt19937_64 rng(3);
  std::exponential_distribution<double> draw(1.0);
  int hits = 0;
  const int trials = 200000;
  for (int t = 0; t < trials; ++t) {
    double m = INFINITY;
    for (int i = 0; i < 5; ++i) m = std::min(m, draw(rng));
    hits += m < 0.5;
  }
  const double p = static_cast<double>(hits) / trials;
  CHECK(std::abs(p - t_bound_min_family(ex, 5, 0.25).value) <= 3 * std::sqrt(p * (1 - p) / trials));
}

TEST_CASE("S for log-concave laws") {
  const auto g = Distribution::gaussian(0, 1);
  const BoundReport one = s_bound_log_concave(g, 1, 1.0, mc_with(100000));
  CHECK(std::abs(one.value - s_bound_one_sample(g, 1.0).value) <= 3 * one.ci_half_width);
  const BoundReport four = s_bound_log_concave(g, 4, 0.5, mc_with(100000));
  CHECK(std::abs(four.value - (2 * oracle::normal_cdf(1.0) - 1)) <= 3 * four.ci_half_width);
  CHECK(four.s_equals_t_certified);
  const BoundReport scaled = s_bound_log_concave(Distribution::gaussian(0, 2), 1, 2.0, mc_with(100000, 5));
  CHECK(std::abs(scaled.value - one.value) <= 3 * (scaled.ci_half_width + one.ci_half_width));
}

TEST_CASE("bounds offered per family") {
  const MCConfig mc = mc_with(5000);
  auto find = [](const std::vector<BoundReport>& v, BoundKind k) {
    for (const auto& b : v)
      if (b.kind == k) return b;
    FAIL("missing bound");
    return v.front();
  };
  const auto atoms = applicable_bounds(kThree, 1, 0.75, mc);
  CHECK(find(atoms, BoundKind::S).value == Approx(0.6));
  CHECK(find(atoms, BoundKind::T).value == Approx(0.65));

  const auto ex = applicable_bounds(Distribution::exponential(1), 3, 0.25, mc);
  CHECK(find(ex, BoundKind::S).value == find(ex, BoundKind::T).value);

  const auto bi = applicable_bounds(Distribution::piecewise({{0, 0}, {1, 0.5}, {2, 0}, {3, 0.5}, {4, 0}}), 2, 0.4, mc);
  CHECK_FALSE(find(bi, BoundKind::S).available);
  CHECK_FALSE(find(bi, BoundKind::T).available);

  // Several samples from atoms with distinct distances: S is attained by the exact
  // recovery estimator; T has no algorithm.
  const auto many = applicable_bounds(Distribution::atoms({{0, 0.4}, {1, 0.4}, {3, 0.2}}), 2, 0.6, mc);
  CHECK(find(many, BoundKind::S).available);
  // distinct samples pin theta down (mass .64); equal samples: window over {0, 1}
  // catches .16 + .16 of the remaining .36
  CHECK(find(many, BoundKind::S).value == Approx(0.64 + 0.32));
  CHECK_FALSE(find(many, BoundKind::T).available);
}

TEST_CASE("sumsets") {
  const std::vector<double> z01 = {0, 1};
  CHECK(sumset_Yk(z01, 3) == std::vector<double>{0, 1, 2});
  const std::vector<double> single = {2.5};
  CHECK(sumset_Yk(single, 4) == std::vector<double>{0, 2.5, 5, 7.5});
  const std::vector<double> z013 = {0, 1, 3};
  for (std::size_t k = 1; k <= 5; ++k) {
    const auto a = sumset_Yk(z013, k);
    const auto b = sumset_Yk(z013, k + 1);
    CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
    // Y_k + Z sits inside Y_{k+1}.
    const auto az = sumset(a, z013);
    CHECK(std::includes(b.begin(), b.end(), az.begin(), az.end()));
  }
  const std::vector<Rational> zr = {0, Rational(1, 3), Rational(2, 3)};
  CHECK(sumset_Yk_exact(zr, 3).size() == 7);  // {0, 1/3, ..., 2}
  const std::vector<double> seven = {0, 1, 2, 3, 4, 5, 6};
  CHECK_THROWS_AS(sumset_Yk(seven, 2), Error);
  const std::vector<double> six = {0, 1, 2, 3, 4, 5};
  CHECK_THROWS_AS(sumset_Yk(six, 20), Error);
}

TEST_CASE("averaging lemma examples") {
  const auto even = Distribution::atoms({{0, 0.5}, {1, 0.5}});
  const LemmaCheck a = lemma_bound_check(discrete_one_sample_estimator(even, 0.6), even, 0.6, 3);
  CHECK(a.s_value == Approx(1.0));
  CHECK(a.avg_quality == Approx(1.0));
  CHECK(a.y_size == 3);
  CHECK(a.yz_size == 4);
  CHECK(a.bound == Approx(4.0 / 3.0));
  CHECK(a.holds);

  const auto skew = Distribution::atoms({{0, 0.4}, {1, 0.6}});
  const Estimator guess_one = offset_estimator(min_shift_estimator(1.0), 0.0);  // x - 1
  const LemmaCheck b = lemma_bound_check(guess_one, skew, 0.25, 4);
  CHECK(b.s_value == Approx(0.6));
  CHECK(b.avg_quality == Approx(0.6));
  CHECK(b.bound == Approx(0.6 * 5.0 / 4.0));
  CHECK(b.holds);
}

TEST_CASE("averaging lemma on random table estimators") {
  for_all(3, 121, [](std::mt19937_64& rng, std::size_t) {
    const auto atoms = oracle::random_atoms(rng, 2 + rng() % 3, 12);
    const auto d = gen::exact_atoms(atoms);
    const Rational delta(1 + static_cast<int>(rng() % 8), 8);
    const auto z = d.finite_atoms().locations();
    const auto points = sumset(sumset_Yk(z, 5), z);
    for (int j = 0; j < 10; ++j) {
      const auto e = gen::random_table_estimator(rng, points, z);
      for (std::size_t k = 1; k <= 5; ++k) CHECK(lemma_bound_check(e, d, to_double(delta), k, {false, delta}).holds);
    }
  });
}

TEST_CASE("the discrete one-sample estimator attains S on every sumset shift") {
  for_all(10, 131, [](std::mt19937_64& rng, std::size_t) {
    const auto atoms = oracle::random_atoms(rng, 1 + rng() % 4, 16);
    const auto d = gen::exact_atoms(atoms);
    const Rational delta(1 + static_cast<int>(rng() % 8), 8);
    const WindowOptions opts{false, delta};
    const auto e = discrete_one_sample_estimator(d, to_double(delta), opts);
    const double s = s_bound_one_sample(d, to_double(delta), opts).value;
    for (double theta : sumset_Yk(d.finite_atoms().locations(), 3))
      CHECK(exact_quality_discrete(e, d, 1, theta, to_double(delta)) == Approx(s).epsilon(1e-12));
  });
}
