#include "threshq/compact_circle.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "threshq/error.hpp"
#include "threshq/windows.hpp"

namespace threshq::circle {

namespace {

double wrap(double v) {
  double w = v - std::floor(v);
  if (w >= 1.0) w = 0.0;  // v just below an integer can round up
  return w;
}

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

CirclePoint::CirclePoint(double v) : value_(wrap(v)) {
  if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "circle points must be finite");
}

double distance(CirclePoint u, CirclePoint v) {
  const double diff = std::abs(u.value() - v.value());
  return std::min(diff, 1.0 - diff);
}

CircleDistribution CircleDistribution::make(std::vector<Knot> knots) {
  if (knots.size() < 2 || knots.front().x != 0.0 || knots.back().x != 1.0)
    fail(ErrorCode::InvalidArgument, "circle density knots must span exactly [0, 1]");
  return CircleDistribution(PiecewiseDensity::make(std::move(knots)));
}

CircleDistribution CircleDistribution::uniform() { return make({{0.0, 1.0}, {1.0, 1.0}}); }

CircleEstimator::CircleEstimator(std::string label, Invariance invariance, Fn fn)
    : label_(std::move(label)), invariance_(invariance), fn_(std::move(fn)) {
  if (!fn_) fail(ErrorCode::InvalidArgument, "circle estimator needs an evaluation function");
}

CircleEstimator constant_estimator(double value) {
  const CirclePoint c(value);
  return CircleEstimator("constant(" + fmt(c.value()) + ")", Invariance::None,
                         [c](std::span<const CirclePoint>) { return c; });
}

CircleEstimator biased_mean_estimator(double bias) {
  return CircleEstimator("biased_mean(" + fmt(bias) + ")", Invariance::ShiftInvariant,
                         [bias](std::span<const CirclePoint> x) {
                           double s = 0.0;
                           double c = 0.0;
                           for (const auto& p : x) {
                             s += std::sin(2.0 * std::numbers::pi * p.value());
                             c += std::cos(2.0 * std::numbers::pi * p.value());
                           }
                           return CirclePoint(std::atan2(s, c) / (2.0 * std::numbers::pi) + bias);
                         });
}

CircleEstimator warped_first_estimator(double amplitude) {
  return CircleEstimator("warped_first(" + fmt(amplitude) + ")", Invariance::None,
                         [amplitude](std::span<const CirclePoint> x) {
                           const double v = x[0].value();
                           return CirclePoint(v + amplitude * std::sin(2.0 * std::numbers::pi * v));
                         });
}

CircleEstimator table_estimator(std::vector<double> values) {
  if (values.empty()) fail(ErrorCode::InvalidArgument, "table estimator needs at least one value");
  const std::string label = "table(" + std::to_string(values.size()) + " bins)";
  return CircleEstimator(label, Invariance::None, [values = std::move(values)](std::span<const CirclePoint> x) {
    const auto bin = std::min(values.size() - 1,
                              static_cast<std::size_t>(x[0].value() * static_cast<double>(values.size())));
    return CirclePoint(values[bin]);
  });
}

CircleEstimator s_gamma(const CircleEstimator& e, CirclePoint gamma) {
  return CircleEstimator("s_gamma(" + e.label() + ", " + fmt(gamma.value()) + ")", Invariance::ShiftInvariant,
                         [e, gamma](std::span<const CirclePoint> x) {
                           std::vector<CirclePoint> moved(x.size());
                           moved[0] = gamma;
                           for (std::size_t i = 1; i < x.size(); ++i) moved[i] = gamma + (x[i] - x[0]);
                           return x[0] - gamma + e(moved);
                         });
}

Estimate quality_at(const CircleEstimator& e, const CircleDistribution& d, std::size_t n, CirclePoint theta,
                    double delta, const MCConfig& mc) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "sample count must be at least 1");
  if (!(delta > 0 && delta < 0.5)) fail(ErrorCode::InvalidArgument, "circle delta must lie in (0, 1/2)");
  const std::uint64_t hits = count_successes(mc, [&](Rng& rng) {
    thread_local std::vector<CirclePoint> x;
    x.resize(n);
    for (auto& xi : x) xi = theta + d.draw(rng);
    return within_threshold(distance(e(x), theta), delta, false);
  });
  return wilson_estimate(hits, mc.trials, mc.ci_level);
}

AveragingResult averaging_check(const CircleEstimator& e, const CircleDistribution& d, std::size_t n, double delta,
                                std::size_t grid, const MCConfig& mc) {
  if (grid < 8) fail(ErrorCode::InvalidArgument, "gamma grid must have at least 8 points");
  AveragingResult out;
  const double g = static_cast<double>(grid);

  bool first = true;
  for (std::size_t j = 0; j < grid; ++j) {
    const double theta = static_cast<double>(j) / g;
    const Estimate est = quality_at(e, d, n, CirclePoint(theta), delta, mc);
    out.per_theta.push_back({theta, est.q, est.ci_half_width});
    out.theta_average += est.q / g;
    if (first || est.q < out.q_e) {
      out.q_e = est.q;
      out.q_e_ci = est.ci_half_width;
      first = false;
    }
  }

  first = true;
  for (std::size_t j = 0; j < grid; ++j) {
    const CirclePoint gamma(static_cast<double>(j) / g);
    const Estimate est = quality_at(s_gamma(e, gamma), d, n, CirclePoint(0.0), delta, mc);
    out.per_gamma.push_back({gamma.value(), est.q, est.ci_half_width});
    out.gamma_average += est.q / g;
    out.gamma_average_ci += est.ci_half_width / g;
    if (first || est.q > out.q_best) {
      out.q_best = est.q;
      out.q_best_ci = est.ci_half_width;
      out.best_gamma = gamma;
      first = false;
    }
  }
  out.holds = out.q_best >= out.q_e - 3.0 * (out.q_best_ci + out.q_e_ci);
  out.average_holds = out.gamma_average >= out.q_e - 3.0 * (out.gamma_average_ci + out.q_e_ci);
  return out;
}

}  // namespace threshq::circle
