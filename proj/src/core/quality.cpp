#include "threshq/quality.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "threshq/error.hpp"
#include "threshq/windows.hpp"

namespace threshq {

namespace {

constexpr double kEnumerationLimit = 1e6;

void check_common(const RandomizedEstimator& e, std::size_t n, double delta) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "sample count must be at least 1");
  if (!(delta > 0)) fail(ErrorCode::InvalidArgument, "delta must be positive");
  if (!e.accepts(n)) {
    std::ostringstream msg;
    msg << e.label() << " does not accept " << n << " samples";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
}

}  // namespace

void MCConfig::validate() const {
  if (trials < 100) fail(ErrorCode::InvalidArgument, "trials must be at least 100");
  if (parallelism == 0) fail(ErrorCode::InvalidArgument, "parallelism must be at least 1");
  if (!(ci_level > 0 && ci_level < 1)) fail(ErrorCode::InvalidArgument, "ci_level must lie in (0, 1)");
}

Estimate wilson_estimate(std::uint64_t successes, std::uint64_t trials, double level) {
  Estimate out;
  out.successes = successes;
  out.trials = trials;
  if (trials == 0) return out;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * level);
  const double z2 = z * z;
  out.q = p;
  out.ci_half_width = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return out;
}

std::uint64_t count_successes(const MCConfig& mc, const std::function<bool(Rng&)>& trial) {
  mc.validate();
  const std::uint64_t chunks = (mc.trials + MCConfig::kChunkSize - 1) / MCConfig::kChunkSize;
  std::vector<std::uint64_t> per_chunk(chunks, 0);

  auto run_chunk = [&](std::uint64_t c) {
    Rng rng(chunk_seed(mc.seed, c));
    const std::uint64_t begin = c * MCConfig::kChunkSize;
    const std::uint64_t end = std::min(mc.trials, begin + MCConfig::kChunkSize);
    std::uint64_t hits = 0;
    for (std::uint64_t t = begin; t < end; ++t) hits += trial(rng) ? 1 : 0;
    per_chunk[c] = hits;
  };

  const std::uint64_t workers = std::min<std::uint64_t>(mc.parallelism, chunks);
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t c = w; c < chunks; c += workers) run_chunk(c);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& err : errors)
      if (err) std::rethrow_exception(err);
  }
  std::uint64_t total = 0;
  for (auto h : per_chunk) total += h;
  return total;
}

Estimate quality_at(const RandomizedEstimator& e, const Distribution& d, std::size_t n, double theta, double delta,
                    const MCConfig& mc, const QualityOptions& opts) {
  check_common(e, n, delta);
  const std::uint64_t hits = count_successes(mc, [&](Rng& rng) {
    thread_local std::vector<double> x;
    x.resize(n);
    for (auto& xi : x) xi = theta + draw(d, rng);
    const double guess = e.evaluate(x, rng);
    return within_threshold(std::abs(guess - theta), delta, opts.closed_interval, theta);
  });
  return wilson_estimate(hits, mc.trials, mc.ci_level);
}

double exact_quality_discrete(const RandomizedEstimator& e, const Distribution& d, std::size_t n, double theta,
                              double delta, const QualityOptions& opts) {
  check_common(e, n, delta);
  const auto& atoms = d.finite_atoms().atoms();
  const double r = static_cast<double>(atoms.size());
  if (std::pow(r, static_cast<double>(n)) > kEnumerationLimit) {
    std::ostringstream msg;
    msg << "exact enumeration of " << atoms.size() << "^" << n << " atom tuples exceeds 10^6";
    fail(ErrorCode::Limit, msg.str());
  }

  std::size_t tuples = 1;
  for (std::size_t i = 0; i < n; ++i) tuples *= atoms.size();

  double total = 0.0;
  std::vector<double> x(n);
  for (const auto& part : e.components()) {
    double q = 0.0;
    for (std::size_t t = 0; t < tuples; ++t) {
      std::size_t rem = t;
      double mass = 1.0;
      for (std::size_t i = n; i-- > 0;) {
        const auto& atom = atoms[rem % atoms.size()];
        rem /= atoms.size();
        x[i] = theta + atom.location;
        mass *= atom.mass;
      }
      if (within_threshold(std::abs(part.estimator(x) - theta), delta, opts.closed_interval, theta)) q += mass;
    }
    total += e.components().size() == 1 ? q : part.weight * q;
  }
  return total;
}

QualityReport quality_inf(const RandomizedEstimator& e, const Distribution& d, std::size_t n, double delta,
                          std::span<const double> theta_grid, const MCConfig& mc, const QualityOptions& opts) {
  check_common(e, n, delta);
  if (theta_grid.empty()) fail(ErrorCode::InvalidArgument, "theta grid must be nonempty");
  QualityReport report;
  report.estimator = e.label();
  report.n = n;
  report.delta = delta;
  report.shift_invariant_claim = e.invariance() == Invariance::ShiftInvariant;
  report.worst_case_is_upper_bound = !report.shift_invariant_claim;

  const bool exact = d.is_discrete() &&
                     std::pow(static_cast<double>(d.finite_atoms().size()), static_cast<double>(n)) <= kEnumerationLimit;
  for (double theta : theta_grid) {
    ThetaQuality tq;
    tq.theta = theta;
    if (exact) {
      tq.q = exact_quality_discrete(e, d, n, theta, delta, opts);
      tq.exact = true;
    } else {
      const Estimate est = quality_at(e, d, n, theta, delta, mc, opts);
      tq.q = est.q;
      tq.ci_half_width = est.ci_half_width;
    }
    report.per_theta.push_back(tq);
  }
  report.worst_case = *std::min_element(report.per_theta.begin(), report.per_theta.end(),
                                        [](const ThetaQuality& a, const ThetaQuality& b) { return a.q < b.q; });
  if (report.shift_invariant_claim) {
    for (const auto& a : report.per_theta)
      for (const auto& b : report.per_theta) {
        const double slack = (a.exact && b.exact) ? 1e-12 : 3.0 * (a.ci_half_width + b.ci_half_width);
        if (std::abs(a.q - b.q) > slack) report.invariance_consistent = false;
      }
  }
  return report;
}

std::vector<double> default_theta_grid(double delta, std::size_t n, std::size_t k, Invariance invariance) {
  const double span = 10.0 * delta * static_cast<double>(n);
  if (invariance == Invariance::ShiftInvariant) return {-span, 0.0, span};
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(-span + 2.0 * span * i / 40.0);
  for (std::size_t i = 1; i <= k; ++i) grid.push_back(2.0 * delta * static_cast<double>(i));
  return grid;
}

AveragedPerformance averaged_performance_bound(const RandomizedEstimator& e, const Distribution& d, std::size_t n,
                                               double delta, std::size_t k, const MCConfig& mc,
                                               const QualityOptions& opts) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "k must be at least 1");
  std::vector<double> grid;
  for (std::size_t i = 1; i <= k; ++i) grid.push_back(2.0 * delta * static_cast<double>(i));
  const QualityReport report = quality_inf(e, d, n, delta, grid, mc, opts);
  AveragedPerformance out;
  out.points = report.per_theta;
  out.minimum = report.worst_case.q;
  for (const auto& p : out.points) {
    out.average += p.q;
    out.ci_half_width += p.ci_half_width;
  }
  out.average /= static_cast<double>(k);
  out.ci_half_width /= static_cast<double>(k);
  return out;
}

}  // namespace threshq
