#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "threshq/distributions.hpp"
#include "threshq/random.hpp"
#include "threshq/windows.hpp"

namespace threshq {

enum class Invariance { ShiftInvariant, None };

/// A map from an n-sample vector to a location estimate.
class Estimator {
 public:
  using Fn = std::function<double(std::span<const double>)>;
  static constexpr std::size_t kAnySampleCount = 0;

  Estimator(std::string label, Invariance invariance, std::size_t sample_count, Fn fn);

  /// Throws InvalidArgument when the sample count is not accepted.
  double operator()(std::span<const double> x) const;

  bool accepts(std::size_t n) const { return sample_count_ == kAnySampleCount || sample_count_ == n; }
  std::size_t sample_count() const { return sample_count_; }
  Invariance invariance() const { return invariance_; }
  const std::string& label() const { return label_; }

  /// Free-form note on what is known about optimality ("optimal", "unverified", ...).
  const std::string& optimality() const { return optimality_; }
  Estimator& with_optimality(std::string note) {
    optimality_ = std::move(note);
    return *this;
  }

 private:
  std::string label_;
  Invariance invariance_;
  std::size_t sample_count_;
  Fn fn_;
  std::string optimality_;
};

struct WeightedEstimator {
  Estimator estimator;
  double weight;
};

/// Finite probability mixture of estimators. A single estimator converts
/// implicitly into a one-component mixture that never consumes randomness.
class RandomizedEstimator {
 public:
  RandomizedEstimator(Estimator e);  // NOLINT(google-explicit-constructor)
  explicit RandomizedEstimator(std::vector<WeightedEstimator> components);

  double evaluate(std::span<const double> x, Rng& rng) const;

  const std::vector<WeightedEstimator>& components() const { return components_; }
  bool accepts(std::size_t n) const;
  /// ShiftInvariant when every component is.
  Invariance invariance() const;
  std::string label() const;

 private:
  std::vector<WeightedEstimator> components_;
  std::vector<double> cumulative_;
};

/// Sample mean minus the mean of the base law.
Estimator mean_estimator(const Distribution& d);

/// Window estimator: on each orbit, the center of the length-2*delta window of
/// maximal integrated likelihood. Strictly log-concave laws use bisection and are
/// optimal for every n. Other unimodal or half-line monotone laws are exact for
/// n = 1 and fall back to a numeric window search for n > 1 (optimality unverified).
Estimator window_mle_estimator(const Distribution& d, double delta);

/// min(x) - delta.
Estimator min_shift_estimator(double delta);

/// x - c*, with c* the center of a maximal-mass window of the atoms.
Estimator discrete_one_sample_estimator(const Distribution& d, double delta, const WindowOptions& opts = {});

/// Recovers the shift exactly when two samples differ (requires distinct pairwise
/// distances); falls back to the one-sample rule when all samples coincide.
Estimator discrete_n_sample_estimator(const Distribution& d, double delta, std::size_t n,
                                      const WindowOptions& opts = {});

/// Shift-invariant extension of a rule on the cross-section {x : x_1 = 0}:
/// e(x) = x_1 - f0(x - x_1).
Estimator invariant_extension(std::function<double(std::span<const double>)> f0, std::size_t n);

Estimator constant_estimator(double value);

/// e(x) + c, same invariance as e.
Estimator offset_estimator(Estimator e, double c);

RandomizedEstimator mixture(std::vector<WeightedEstimator> components);

}  // namespace threshq
