#include "threshq/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "threshq/error.hpp"

namespace threshq {

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

Estimator::Estimator(std::string label, Invariance invariance, std::size_t sample_count, Fn fn)
    : label_(std::move(label)), invariance_(invariance), sample_count_(sample_count), fn_(std::move(fn)) {
  if (!fn_) fail(ErrorCode::InvalidArgument, "estimator needs an evaluation function");
}

double Estimator::operator()(std::span<const double> x) const {
  if (x.empty() || !accepts(x.size())) {
    std::ostringstream msg;
    msg << label_ << " accepts " << sample_count_ << " samples, got " << x.size();
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  return fn_(x);
}

// ---------------------------------------------------------------------------

RandomizedEstimator::RandomizedEstimator(Estimator e) : components_{{std::move(e), 1.0}}, cumulative_{1.0} {}

RandomizedEstimator::RandomizedEstimator(std::vector<WeightedEstimator> components)
    : components_(std::move(components)) {
  if (components_.empty()) fail(ErrorCode::InvalidArgument, "mixture needs at least one component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0)) fail(ErrorCode::InvalidArgument, "mixture weights must be positive");
    total += c.weight;
    cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-12) fail(ErrorCode::InvalidArgument, "mixture weights must sum to 1");
}

double RandomizedEstimator::evaluate(std::span<const double> x, Rng& rng) const {
  if (components_.size() == 1) return components_.front().estimator(x);
  const double u = rng.open_unit() * cumulative_.back();
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), components_.size() - 1);
  return components_[idx].estimator(x);
}

bool RandomizedEstimator::accepts(std::size_t n) const {
  return std::all_of(components_.begin(), components_.end(),
                     [n](const WeightedEstimator& c) { return c.estimator.accepts(n); });
}

Invariance RandomizedEstimator::invariance() const {
  const bool all = std::all_of(components_.begin(), components_.end(), [](const WeightedEstimator& c) {
    return c.estimator.invariance() == Invariance::ShiftInvariant;
  });
  return all ? Invariance::ShiftInvariant : Invariance::None;
}

std::string RandomizedEstimator::label() const {
  if (components_.size() == 1) return components_.front().estimator.label();
  std::string out = "mixture(";
  for (std::size_t i = 0; i < components_.size(); ++i)
    out += (i ? ", " : "") + fmt(components_[i].weight) + "*" + components_[i].estimator.label();
  return out + ")";
}

RandomizedEstimator mixture(std::vector<WeightedEstimator> components) {
  return RandomizedEstimator(std::move(components));
}

// ---------------------------------------------------------------------------

Estimator mean_estimator(const Distribution& d) {
  const double mu = mean(d);
  return Estimator("mean", Invariance::ShiftInvariant, Estimator::kAnySampleCount,
                   [mu](std::span<const double> x) {
                     return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()) - mu;
                   });
}

Estimator window_mle_estimator(const Distribution& d, double delta) {
  if (!(delta > 0)) fail(ErrorCode::InvalidArgument, "delta must be positive");
  if (d.is_discrete()) fail(ErrorCode::Domain, "window estimator needs a continuous law; use discrete_mle for atoms");
  const FamilyTraits traits = classify(d);
  const bool any_n = traits.log_concave_strict;
  if (!any_n && !traits.unimodal && !traits.monotone_on_halfline)
    fail(ErrorCode::Domain, "window estimator needs a log-concave, unimodal, or half-line monotone law");

  if (!any_n) {
    // One sample: exact center. More samples: numeric window search, whose
    // optimality is not established for these laws.
    const double center = unimodal_window_center(d, delta);
    Estimator e("window_mle", Invariance::ShiftInvariant, Estimator::kAnySampleCount,
                [d, delta, center](std::span<const double> x) {
                  if (x.size() == 1) return x[0] - center;
                  std::vector<double> offsets(x.size());
                  for (std::size_t i = 0; i < x.size(); ++i) offsets[i] = x[i] - x[0];
                  return x[0] - orbit_window_center_search(d, offsets, delta);
                });
    e.with_optimality("optimal for n = 1, unverified for n > 1");
    return e;
  }
  Estimator e("window_mle", Invariance::ShiftInvariant, Estimator::kAnySampleCount,
              [d, delta](std::span<const double> x) {
                std::vector<double> offsets(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) offsets[i] = x[i] - x[0];
                return x[0] - orbit_window_center(d, offsets, delta);
              });
  e.with_optimality("optimal (log-concave)");
  return e;
}

Estimator min_shift_estimator(double delta) {
  if (!(delta > 0)) fail(ErrorCode::InvalidArgument, "delta must be positive");
  return Estimator("min_shift", Invariance::ShiftInvariant, Estimator::kAnySampleCount,
                   [delta](std::span<const double> x) { return *std::min_element(x.begin(), x.end()) - delta; });
}

Estimator discrete_one_sample_estimator(const Distribution& d, double delta, const WindowOptions& opts) {
  const AtomWindow w = best_atom_window(d.finite_atoms(), delta, opts);
  const double center = w.center;
  Estimator e("discrete_mle", Invariance::ShiftInvariant, 1,
              [center](std::span<const double> x) { return x[0] - center; });
  e.with_optimality("optimal (one-sample atomic)");
  return e;
}

Estimator discrete_n_sample_estimator(const Distribution& d, double delta, std::size_t n, const WindowOptions& opts) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "sample count must be at least 1");
  const FiniteAtoms& atoms = d.finite_atoms();
  if (n == 1) return discrete_one_sample_estimator(d, delta, opts);
  if (!classify(d).distinct_pairwise_distances)
    fail(ErrorCode::Domain, "n-sample atomic estimator needs distinct pairwise distances between atoms");

  const double center = best_atom_window(atoms, delta, opts).center;
  const std::vector<double> z = atoms.locations();
  Estimator e("discrete_mle", Invariance::ShiftInvariant, n, [center, z](std::span<const double> x) {
    const double tol = FiniteAtoms::kLocationTolerance * std::max(1.0, std::abs(x[0]));
    const bool all_equal =
        std::all_of(x.begin(), x.end(), [&](double v) { return std::abs(v - x[0]) <= tol; });
    if (all_equal) return x[0] - center;

    auto on_atom = [&](double v) {
      auto it = std::lower_bound(z.begin(), z.end(), v - tol);
      return it != z.end() && std::abs(*it - v) <= tol;
    };
    for (double zi : z) {
      const double theta = x[0] - zi;
      if (std::all_of(x.begin(), x.end(), [&](double v) { return on_atom(v - theta); })) return theta;
    }
    fail(ErrorCode::Inconsistent, "no shift places every sample on an atom");
  });
  e.with_optimality("optimal (atomic, distinct distances)");
  return e;
}

Estimator invariant_extension(std::function<double(std::span<const double>)> f0, std::size_t n) {
  if (!f0) fail(ErrorCode::InvalidArgument, "invariant extension needs a cross-section rule");
  return Estimator("invariant_extension", Invariance::ShiftInvariant, n,
                   [f0 = std::move(f0)](std::span<const double> x) {
                     std::vector<double> x0(x.size());
                     for (std::size_t i = 0; i < x.size(); ++i) x0[i] = x[i] - x[0];
                     x0[0] = 0.0;
                     return x[0] - f0(x0);
                   });
}

Estimator constant_estimator(double value) {
  return Estimator("constant(" + fmt(value) + ")", Invariance::None, Estimator::kAnySampleCount,
                   [value](std::span<const double>) { return value; });
}

Estimator offset_estimator(Estimator e, double c) {
  const std::string label = e.label() + (c < 0 ? "" : "+") + fmt(c);
  const Invariance inv = e.invariance();
  const std::size_t n = e.sample_count();
  return Estimator(label, inv, n, [e = std::move(e), c](std::span<const double> x) { return e(x) + c; });
}

}  // namespace threshq
