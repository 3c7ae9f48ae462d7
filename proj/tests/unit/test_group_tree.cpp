#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "threshq/error.hpp"
#include "threshq/group_tree.hpp"

using namespace threshq;
using namespace threshq::tree;

namespace {

std::string random_letters(std::mt19937_64& rng, std::size_t max_len) {
  std::string s(rng() % (max_len + 1), 'a');
  for (auto& ch : s) ch = "abc"[rng() % 3];
  return s;
}

Word random_word(std::mt19937_64& rng, std::size_t max_len) { return Word::reduce(random_letters(rng, max_len)); }

const TreeDistribution kStd = TreeDistribution::standard();

}  // namespace

TEST_CASE("words") {
  CHECK(Word::reduce("aab").str() == "b");
  CHECK(Word::reduce("abba").is_identity());
  CHECK(Word::reduce("abcca").str() == "aba");
  CHECK(multiply(Word("ab"), Word("bc")).str() == "ac");
  CHECK(inverse(Word("abc")).str() == "cba");
  CHECK(distance(Word("ab"), Word("ac")) == 2);
  CHECK(Word().display() == "1");
  CHECK_THROWS_AS(Word("abb"), Error);
  CHECK_THROWS_AS(Word("abd"), Error);
}

TEST_CASE("group axioms on random words") {
  for_all(5000, 201, [](std::mt19937_64& rng, std::size_t) {
    const Word u = random_word(rng, 10), v = random_word(rng, 10), w = random_word(rng, 10);
    CHECK(multiply(multiply(u, v), w) == multiply(u, multiply(v, w)));
    CHECK(multiply(u, inverse(u)).is_identity());
    CHECK(multiply(Word(), u) == u);
    CHECK(multiply(u, Word()) == u);
    // reduce is a homomorphism from strings
    const std::string s = random_letters(rng, 12), t = random_letters(rng, 12);
    CHECK(Word::reduce(s + t) == multiply(Word::reduce(s), Word::reduce(t)));
    // left-invariant metric
    CHECK(distance(u, v) == distance(multiply(w, u), multiply(w, v)));
    CHECK(distance(u, w) <= distance(u, v) + distance(v, w));
    CHECK(distance(u, v) == distance(v, u));
    CHECK((distance(u, v) == 0) == (u == v));
  });
}

TEST_CASE("balls") {
  for (std::size_t r = 0; r <= 8; ++r) {
    const auto b = ball(r);
    const auto brute = oracle::tree_ball_brute(r);
    CHECK(b.size() == (r == 0 ? 1 : 3 * (std::size_t{1} << r) - 2));
    CHECK(b.size() == brute.size());
    for (const auto& w : b) CHECK(brute.count(w.str()) == 1);
    for (std::size_t i = 1; i < b.size(); ++i)
      CHECK((b[i - 1].length() < b[i].length() || (b[i - 1].length() == b[i].length() && b[i - 1].str() < b[i].str())));
  }
}

TEST_CASE("truncation has quality 2/3") {
  CHECK(evaluate(Truncation{}, Word("abc")).str() == "ab");
  CHECK(evaluate(Truncation{}, Word()).str() == "a");
  const BallQuality bq = quality_inf_ball(Truncation{}, kStd, 0.5, 8);
  CHECK(bq.q == Rational(2, 3));
  CHECK(bq.is_global_infimum);
  CHECK(bq.per_theta.size() == 3 * 256 - 2);
  // theta = 1: sample is a letter, truncation returns 1. theta = a: samples ab, ac
  // truncate to a, sample 1 maps to "a" too. Elsewhere two of the three neighbours
  // are children.
  for (const auto& row : bq.per_theta) {
    INFO(row.theta.display());
    if (row.theta.is_identity() || row.theta.str() == "a")
      CHECK(row.q == 1);
    else
      CHECK(row.q == Rational(2, 3));
  }
  CHECK(exact_quality(Truncation{}, kStd, Word("b"), 0.9) == Rational(2, 3));
}

TEST_CASE("translates do no better than 1/3") {
  for (std::size_t len = 0; len <= 4; ++len) {
    for (const auto& w : ball(len)) {
      if (w.length() != len) continue;
      const auto l = quality_inf_ball(LeftTranslate{w}, kStd, 0.5, 6);
      const auto r = quality_inf_ball(RightTranslate{w}, kStd, 0.5, 6);
      INFO(w.display());
      CHECK(l.q <= Rational(1, 3));
      CHECK(r.q <= Rational(1, 3));
      CHECK(l.is_global_infimum);
    }
  }
  CHECK(quality_inf_ball(RightTranslate{Word()}, kStd, 0.5, 4).q == 0);
  CHECK(quality_inf_ball(LeftTranslate{Word("a")}, kStd, 0.5, 4).q == Rational(1, 3));
}

TEST_CASE("no table estimator found by random search beats truncation") {
  const auto b6 = ball(6);
  const auto b7 = ball(7);
  for_all(10000, 211, [&](std::mt19937_64& rng, std::size_t i) {
    Table t;
    t.fallback = Word("a");
    // half the candidates perturb truncation, the rest are arbitrary maps
    const bool near_truncation = i % 2 == 0;
    for (const auto& x : b7) {
      if (near_truncation && rng() % 8 != 0)
        t.entries[x] = evaluate(Truncation{}, x);
      else
        t.entries[x] = b6[rng() % b6.size()];
    }
    const auto bq = quality_inf_ball(t, kStd, 0.5, 6);
    CHECK(bq.q <= Rational(2, 3));
    CHECK_FALSE(bq.is_global_infimum);
  });
}

TEST_CASE("tree argument checks") {
  CHECK_THROWS_AS(quality_inf_ball(Truncation{}, kStd, 1.0, 4), Error);
  CHECK_THROWS_AS(quality_inf_ball(Truncation{}, kStd, 0.5, 1), Error);
  CHECK_THROWS_AS(quality_inf_ball(Truncation{}, kStd, 0.5, 19), Error);
  CHECK_THROWS_AS(TreeDistribution({{Word("a"), Rational(1, 2)}}), Error);
  CHECK_THROWS_AS(TreeDistribution({{Word("a"), Rational(1, 2)}, {Word("a"), Rational(1, 2)}}), Error);
}
