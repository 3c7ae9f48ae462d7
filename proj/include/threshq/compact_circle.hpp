#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "threshq/distributions.hpp"
#include "threshq/estimators.hpp"
#include "threshq/quality.hpp"

namespace threshq::circle {

/// Element of R/Z, stored in [0, 1).
class CirclePoint {
 public:
  CirclePoint() = default;
  explicit CirclePoint(double v);

  double value() const { return value_; }

  friend CirclePoint operator+(CirclePoint a, CirclePoint b) { return CirclePoint(a.value_ + b.value_); }
  friend CirclePoint operator-(CirclePoint a, CirclePoint b) { return CirclePoint(a.value_ - b.value_); }
  friend bool operator==(CirclePoint a, CirclePoint b) = default;

 private:
  double value_ = 0.0;
};

/// Bi-invariant arc distance, at most 1/2.
double distance(CirclePoint u, CirclePoint v);

/// Law on the circle given by a piecewise-linear density on [0, 1].
class CircleDistribution {
 public:
  /// Knots must start at 0 and end at 1; same normalization rule as PiecewiseDensity.
  static CircleDistribution make(std::vector<Knot> knots);
  static CircleDistribution uniform();

  double pdf(CirclePoint x) const { return density_.pdf(x.value()); }
  CirclePoint draw(Rng& rng) const { return CirclePoint(density_.quantile(rng.open_unit())); }
  const PiecewiseDensity& density() const { return density_; }

 private:
  explicit CircleDistribution(PiecewiseDensity d) : density_(std::move(d)) {}
  PiecewiseDensity density_;
};

class CircleEstimator {
 public:
  using Fn = std::function<CirclePoint(std::span<const CirclePoint>)>;

  CircleEstimator(std::string label, Invariance invariance, Fn fn);

  CirclePoint operator()(std::span<const CirclePoint> x) const { return fn_(x); }
  Invariance invariance() const { return invariance_; }
  const std::string& label() const { return label_; }

 private:
  std::string label_;
  Invariance invariance_;
  Fn fn_;
};

CircleEstimator constant_estimator(double value);
/// Circular mean of the samples plus `bias` (shift-invariant).
CircleEstimator biased_mean_estimator(double bias);
/// x_1 + amplitude * sin(2 pi x_1): depends on where x_1 sits on the circle.
CircleEstimator warped_first_estimator(double amplitude);
/// values[floor(x_1 * size)]: a lookup table on the first sample.
CircleEstimator table_estimator(std::vector<double> values);

/// The shift-invariant estimator agreeing with e on inputs whose first coordinate is gamma:
/// x -> x_1 - gamma + e(gamma, gamma + (x_2 - x_1), ..., gamma + (x_n - x_1)).
CircleEstimator s_gamma(const CircleEstimator& e, CirclePoint gamma);

/// Monte Carlo P(d(e(x), theta) < delta) with x ~ mu_theta^n.
Estimate quality_at(const CircleEstimator& e, const CircleDistribution& d, std::size_t n, CirclePoint theta,
                    double delta, const MCConfig& mc);

struct GridQuality {
  double point = 0.0;  // theta or gamma
  double q = 0.0;
  double ci_half_width = 0.0;
};

struct AveragingResult {
  double q_e = 0.0;  // minimum of Q^theta(e) over the theta grid
  double q_e_ci = 0.0;
  double theta_average = 0.0;
  CirclePoint best_gamma;
  double q_best = 0.0;
  double q_best_ci = 0.0;
  double gamma_average = 0.0;  // Riemann average of Q(s_gamma)
  double gamma_average_ci = 0.0;
  bool holds = false;          // q_best >= q_e - 3 (ci_best + ci_e)
  bool average_holds = false;  // gamma_average >= q_e - 3 (ci_avg + ci_e)
  std::vector<GridQuality> per_theta;
  std::vector<GridQuality> per_gamma;
};

/// Builds s_gamma on the uniform grid gamma_j = j / grid and compares the best
/// (and the average) against the theta-grid estimate of Q(e). grid >= 8.
AveragingResult averaging_check(const CircleEstimator& e, const CircleDistribution& d, std::size_t n, double delta,
                                std::size_t grid, const MCConfig& mc);

}  // namespace threshq::circle
