#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "threshq/distributions.hpp"
#include "threshq/estimators.hpp"

namespace threshq {

/// Monte Carlo settings. Trials are split into fixed-size chunks, each seeded from
/// (seed, chunk index), so results do not depend on `parallelism`.
struct MCConfig {
  static constexpr std::uint64_t kChunkSize = 8192;

  std::uint64_t trials = 100000;
  std::uint64_t seed = 42;
  unsigned parallelism = 1;
  double ci_level = 0.95;

  /// Throws InvalidArgument on trials < 100, parallelism 0, or ci_level outside (0, 1).
  void validate() const;

  bool operator==(const MCConfig&) const = default;
};

struct QualityOptions {
  bool closed_interval = false;
};

/// Point estimate of a success probability with its Wilson-score half width.
struct Estimate {
  double q = 0.0;
  double ci_half_width = 0.0;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
};

Estimate wilson_estimate(std::uint64_t successes, std::uint64_t trials, double level);

/// Counts successes of `trial(rng)` over mc.trials draws with the chunked seeding
/// contract. Shared by every Monte Carlo evaluator in the library.
std::uint64_t count_successes(const MCConfig& mc, const std::function<bool(Rng&)>& trial);

/// Monte Carlo estimate of P(|e(x) - theta| < delta), x ~ mu_theta^n.
Estimate quality_at(const RandomizedEstimator& e, const Distribution& d, std::size_t n, double theta,
                    double delta, const MCConfig& mc, const QualityOptions& opts = {});

/// Exact value of the same probability for atomic laws by enumerating atom tuples
/// (at most 10^6 of them).
double exact_quality_discrete(const RandomizedEstimator& e, const Distribution& d, std::size_t n, double theta,
                              double delta, const QualityOptions& opts = {});

struct ThetaQuality {
  double theta = 0.0;
  double q = 0.0;
  double ci_half_width = 0.0;
  bool exact = false;
};

struct QualityReport {
  std::string estimator;
  std::size_t n = 1;
  double delta = 0.0;
  std::vector<ThetaQuality> per_theta;
  ThetaQuality worst_case;  // grid minimum
  bool shift_invariant_claim = false;
  /// For invariant estimators: every pair of grid values agreed within 3x their CIs.
  bool invariance_consistent = true;
  /// The grid minimum only bounds the true infimum from above (non-invariant estimators).
  bool worst_case_is_upper_bound = false;
};

/// Quality over a theta grid. Atomic laws with at most 10^6 tuples are evaluated
/// exactly, everything else by Monte Carlo.
QualityReport quality_inf(const RandomizedEstimator& e, const Distribution& d, std::size_t n, double delta,
                          std::span<const double> theta_grid, const MCConfig& mc, const QualityOptions& opts = {});

/// Default grid: {-10 delta n, 0, 10 delta n} for invariant estimators; otherwise
/// 41 points on [-10 delta n, 10 delta n] plus 2 delta i for i = 1..k.
std::vector<double> default_theta_grid(double delta, std::size_t n, std::size_t k, Invariance invariance);

struct AveragedPerformance {
  double average = 0.0;  // (1/k) sum_i Q^{2 delta i}(e), an upper bound on Q(e)
  double minimum = 0.0;  // sharper empirical bound on the infimum
  double ci_half_width = 0.0;  // mean of the per-point half widths
  std::vector<ThetaQuality> points;
};

AveragedPerformance averaged_performance_bound(const RandomizedEstimator& e, const Distribution& d, std::size_t n,
                                               double delta, std::size_t k, const MCConfig& mc,
                                               const QualityOptions& opts = {});

}  // namespace threshq
