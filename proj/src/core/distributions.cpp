#include "threshq/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "threshq/error.hpp"

namespace threshq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite(double v) { return std::isfinite(v); }

}  // namespace

// ---------------------------------------------------------------------------
// PiecewiseDensity

PiecewiseDensity PiecewiseDensity::make(std::vector<Knot> knots) {
  if (knots.size() < 2) fail(ErrorCode::InvalidArgument, "piecewise density needs at least two knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!finite(knots[i].x) || !finite(knots[i].f))
      fail(ErrorCode::InvalidArgument, "piecewise density knots must be finite");
    if (knots[i].f < 0) fail(ErrorCode::InvalidArgument, "piecewise density values must be nonnegative");
    if (i > 0 && !(knots[i].x > knots[i - 1].x))
      fail(ErrorCode::InvalidArgument, "piecewise density knots must be strictly increasing in x");
  }
  double total = 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i)
    total += 0.5 * (knots[i].f + knots[i - 1].f) * (knots[i].x - knots[i - 1].x);
  if (std::abs(total - 1.0) >= 1e-3) {
    std::ostringstream msg;
    msg << "piecewise density integrates to " << total << ", more than 1e-3 away from 1";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  for (auto& k : knots) k.f /= total;

  PiecewiseDensity p;
  p.knots_ = std::move(knots);
  p.cumulative_.assign(p.knots_.size(), 0.0);
  for (std::size_t i = 1; i < p.knots_.size(); ++i) {
    const auto& a = p.knots_[i - 1];
    const auto& b = p.knots_[i];
    p.cumulative_[i] = p.cumulative_[i - 1] + 0.5 * (a.f + b.f) * (b.x - a.x);
  }
  return p;
}

double PiecewiseDensity::pdf(double x) const {
  if (x < lo() || x > hi()) return 0.0;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x, [](double v, const Knot& k) { return v < k.x; });
  if (it == knots_.end()) return knots_.back().f;
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double w = (x - a.x) / (b.x - a.x);
  return a.f + w * (b.f - a.f);
}

double PiecewiseDensity::cdf(double x) const {
  if (x <= lo()) return 0.0;
  if (x >= hi()) return 1.0;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x, [](double v, const Knot& k) { return v < k.x; });
  const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const auto& a = knots_[k];
  const auto& b = knots_[k + 1];
  const double s = x - a.x;
  const double slope = (b.f - a.f) / (b.x - a.x);
  return std::min(1.0, cumulative_[k] + a.f * s + 0.5 * slope * s * s);
}

double PiecewiseDensity::quantile(double u) const {
  const double target = std::clamp(u, 0.0, 1.0) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  std::size_t k = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  k = std::min(k, knots_.size() - 2);
  const auto& a = knots_[k];
  const auto& b = knots_[k + 1];
  const double r = target - cumulative_[k];
  const double half_slope = 0.5 * (b.f - a.f) / (b.x - a.x);
  // Solve half_slope*s^2 + a.f*s = r in the cancellation-free form.
  const double disc = a.f * a.f + 4.0 * half_slope * r;
  const double denom = a.f + std::sqrt(std::max(0.0, disc));
  const double s = denom > 0 ? 2.0 * r / denom : 0.0;
  return std::clamp(a.x + s, a.x, b.x);
}

double PiecewiseDensity::mean() const {
  double m = 0.0;
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    const auto& a = knots_[i - 1];
    const auto& b = knots_[i];
    m += (b.x - a.x) / 6.0 * (a.x * (2 * a.f + b.f) + b.x * (a.f + 2 * b.f));
  }
  return m;
}

double PiecewiseDensity::mode() const {
  auto it = std::max_element(knots_.begin(), knots_.end(), [](const Knot& a, const Knot& b) { return a.f < b.f; });
  return it->x;
}

// ---------------------------------------------------------------------------
// FiniteAtoms

FiniteAtoms FiniteAtoms::make(std::vector<Atom> atoms, std::optional<std::vector<Rational>> exact_locations) {
  if (atoms.empty()) fail(ErrorCode::InvalidArgument, "atomic distribution needs at least one atom");
  if (exact_locations && exact_locations->size() != atoms.size())
    fail(ErrorCode::InvalidArgument, "exact locations must be parallel to atoms");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!finite(a.location)) fail(ErrorCode::InvalidArgument, "atom locations must be finite");
    if (!(a.mass > 0.0 && a.mass <= 1.0)) fail(ErrorCode::InvalidArgument, "atom masses must lie in (0, 1]");
    total += a.mass;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "atom masses sum to " << total << ", not 1";
    fail(ErrorCode::InvalidArgument, msg.str());
  }

  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return atoms[i].location < atoms[j].location; });

  FiniteAtoms out;
  out.atoms_.reserve(atoms.size());
  for (auto i : order) out.atoms_.push_back(atoms[i]);
  if (exact_locations) {
    std::vector<Rational> sorted;
    sorted.reserve(order.size());
    for (auto i : order) sorted.push_back((*exact_locations)[i]);
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i] == sorted[i - 1]) fail(ErrorCode::InvalidArgument, "duplicate atom location " + to_string(sorted[i]));
    out.exact_ = std::move(sorted);
  }
  for (std::size_t i = 1; i < out.atoms_.size(); ++i) {
    if (out.atoms_[i].location - out.atoms_[i - 1].location <= kLocationTolerance && !out.exact_) {
      std::ostringstream msg;
      msg << "duplicate atom location " << out.atoms_[i].location;
      fail(ErrorCode::InvalidArgument, msg.str());
    }
  }
  out.cumulative_.resize(out.atoms_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < out.atoms_.size(); ++i) {
    acc += out.atoms_[i].mass;
    out.cumulative_[i] = acc;
  }
  return out;
}

std::vector<double> FiniteAtoms::locations() const {
  std::vector<double> z;
  z.reserve(atoms_.size());
  for (const auto& a : atoms_) z.push_back(a.location);
  return z;
}

double FiniteAtoms::cdf(double x) const {
  auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x, [](double v, const Atom& a) { return v < a.location; });
  if (it == atoms_.begin()) return 0.0;
  if (it == atoms_.end()) return 1.0;
  return std::min(1.0, cumulative_[static_cast<std::size_t>(it - atoms_.begin()) - 1]);
}

double FiniteAtoms::quantile(double u) const {
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), atoms_.size() - 1);
  return atoms_[idx].location;
}

double FiniteAtoms::mean() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.mass * a.location;
  return m;
}

// ---------------------------------------------------------------------------
// Distribution

Distribution Distribution::gaussian(double mean, double sigma) {
  if (!finite(mean) || !finite(sigma) || !(sigma > 0))
    fail(ErrorCode::InvalidArgument, "gaussian needs a finite mean and positive sigma");
  return Distribution(Gaussian{mean, sigma});
}

Distribution Distribution::exponential(double rate) {
  if (!finite(rate) || !(rate > 0)) fail(ErrorCode::InvalidArgument, "exponential rate must be positive");
  return Distribution(Exponential{rate});
}

Distribution Distribution::uniform(double lo, double hi) {
  if (!finite(lo) || !finite(hi) || !(lo < hi)) fail(ErrorCode::InvalidArgument, "uniform needs lo < hi");
  return Distribution(Uniform{lo, hi});
}

Distribution Distribution::piecewise(std::vector<Knot> knots) {
  return Distribution(PiecewiseDensity::make(std::move(knots)));
}

Distribution Distribution::atoms(std::vector<Atom> atoms, std::optional<std::vector<Rational>> exact_locations) {
  return Distribution(FiniteAtoms::make(std::move(atoms), std::move(exact_locations)));
}

const FiniteAtoms& Distribution::finite_atoms() const {
  if (const auto* a = std::get_if<FiniteAtoms>(&v_)) return *a;
  fail(ErrorCode::Domain, "operation requires an atomic distribution, got " + describe());
}

std::string Distribution::describe() const {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const Gaussian& g) { out << "gaussian(mean=" << g.mean << ", sigma=" << g.sigma << ")"; },
                 [&](const Exponential& e) { out << "exponential(rate=" << e.rate << ")"; },
                 [&](const Uniform& u) { out << "uniform(" << u.lo << ", " << u.hi << ")"; },
                 [&](const PiecewiseDensity& p) {
                   out << "piecewise(" << p.knots().size() << " knots on [" << p.lo() << ", " << p.hi() << "])";
                 },
                 [&](const FiniteAtoms& a) {
                   out << "atoms{";
                   for (std::size_t i = 0; i < a.size(); ++i)
                     out << (i ? ", " : "") << a.atoms()[i].location << ":" << a.atoms()[i].mass;
                   out << "}";
                 },
             },
             v_);
  return out.str();
}

// ---------------------------------------------------------------------------
// Free functions

double pdf(const Distribution& d, double x) {
  return std::visit(overloaded{
                        [&](const Gaussian& g) { return boost::math::pdf(boost::math::normal(g.mean, g.sigma), x); },
                        [&](const Exponential& e) { return x < 0 ? 0.0 : e.rate * std::exp(-e.rate * x); },
                        [&](const Uniform& u) { return (x < u.lo || x > u.hi) ? 0.0 : 1.0 / (u.hi - u.lo); },
                        [&](const PiecewiseDensity& p) { return p.pdf(x); },
                        [&](const FiniteAtoms&) -> double {
                          fail(ErrorCode::Domain, "atomic distributions have no density");
                        },
                    },
                    d.variant());
}

double log_pdf(const Distribution& d, double x) {
  return std::visit(overloaded{
                        [&](const Gaussian& g) {
                          const double z = (x - g.mean) / g.sigma;
                          return -0.5 * z * z - std::log(g.sigma) - 0.91893853320467274178;  // log sqrt(2 pi)
                        },
                        [&](const Exponential& e) { return x < 0 ? -kInf : std::log(e.rate) - e.rate * x; },
                        [&](const Uniform& u) { return (x < u.lo || x > u.hi) ? -kInf : -std::log(u.hi - u.lo); },
                        [&](const PiecewiseDensity& p) {
                          const double f = p.pdf(x);
                          return f > 0 ? std::log(f) : -kInf;
                        },
                        [&](const FiniteAtoms&) -> double {
                          fail(ErrorCode::Domain, "atomic distributions have no density");
                        },
                    },
                    d.variant());
}

double cdf(const Distribution& d, double x) {
  return std::visit(overloaded{
                        [&](const Gaussian& g) {
                          if (std::isinf(x)) return x < 0 ? 0.0 : 1.0;
                          return boost::math::cdf(boost::math::normal(g.mean, g.sigma), x);
                        },
                        [&](const Exponential& e) { return x <= 0 ? 0.0 : -std::expm1(-e.rate * x); },
                        [&](const Uniform& u) {
                          if (x <= u.lo) return 0.0;
                          if (x >= u.hi) return 1.0;
                          return (x - u.lo) / (u.hi - u.lo);
                        },
                        [&](const PiecewiseDensity& p) { return p.cdf(x); },
                        [&](const FiniteAtoms& a) { return a.cdf(x); },
                    },
                    d.variant());
}

double quantile(const Distribution& d, double u) {
  return std::visit(overloaded{
                        [&](const Gaussian& g) {
                          return boost::math::quantile(boost::math::normal(g.mean, g.sigma), u);
                        },
                        [&](const Exponential& e) { return -std::log1p(-u) / e.rate; },
                        [&](const Uniform& un) { return un.lo + u * (un.hi - un.lo); },
                        [&](const PiecewiseDensity& p) { return p.quantile(u); },
                        [&](const FiniteAtoms& a) { return a.quantile(u); },
                    },
                    d.variant());
}

double mean(const Distribution& d) {
  return std::visit(overloaded{
                        [](const Gaussian& g) { return g.mean; },
                        [](const Exponential& e) { return 1.0 / e.rate; },
                        [](const Uniform& u) { return 0.5 * (u.lo + u.hi); },
                        [](const PiecewiseDensity& p) { return p.mean(); },
                        [](const FiniteAtoms& a) { return a.mean(); },
                    },
                    d.variant());
}

Interval support(const Distribution& d) {
  return std::visit(overloaded{
                        [](const Gaussian&) { return Interval{-kInf, kInf}; },
                        [](const Exponential&) { return Interval{0.0, kInf}; },
                        [](const Uniform& u) { return Interval{u.lo, u.hi}; },
                        [](const PiecewiseDensity& p) { return Interval{p.lo(), p.hi()}; },
                        [](const FiniteAtoms& a) {
                          return Interval{a.atoms().front().location, a.atoms().back().location};
                        },
                    },
                    d.variant());
}

Interval effective_support(const Distribution& d) {
  return std::visit(overloaded{
                        [](const Gaussian& g) { return Interval{g.mean - 40 * g.sigma, g.mean + 40 * g.sigma}; },
                        [](const Exponential& e) { return Interval{0.0, 745.0 / e.rate}; },
                        [&](const auto&) { return support(d); },
                    },
                    d.variant());
}

double mode(const Distribution& d) {
  return std::visit(overloaded{
                        [](const Gaussian& g) { return g.mean; },
                        [](const Exponential&) { return 0.0; },
                        [](const Uniform& u) { return u.lo; },
                        [](const PiecewiseDensity& p) { return p.mode(); },
                        [](const FiniteAtoms&) -> double {
                          fail(ErrorCode::Domain, "mode is only defined here for continuous laws");
                        },
                    },
                    d.variant());
}

std::vector<double> sample(const ShiftedDistribution& d, std::uint64_t seed, std::size_t n) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "sample size must be at least 1");
  Rng rng(seed);
  std::vector<double> xs(n);
  for (auto& x : xs) x = d.theta + draw(d.base, rng);
  return xs;
}

namespace {

bool distinct_distances(const FiniteAtoms& a) {
  if (const auto& exact = a.exact_locations()) {
    std::vector<Rational> dist;
    for (std::size_t i = 0; i < exact->size(); ++i)
      for (std::size_t j = i + 1; j < exact->size(); ++j) dist.push_back((*exact)[j] - (*exact)[i]);
    std::sort(dist.begin(), dist.end());
    return std::adjacent_find(dist.begin(), dist.end()) == dist.end();
  }
  std::vector<double> dist;
  const auto z = a.locations();
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j) dist.push_back(z[j] - z[i]);
  std::sort(dist.begin(), dist.end());
  for (std::size_t i = 1; i < dist.size(); ++i)
    if (dist[i] - dist[i - 1] <= FiniteAtoms::kLocationTolerance) return false;
  return true;
}

FamilyTraits classify_piecewise(const PiecewiseDensity& p) {
  const auto& k = p.knots();
  FamilyTraits t;
  // Unimodal: knot values rise then fall (linear interpolation preserves this).
  std::size_t i = 1;
  while (i < k.size() && k[i].f >= k[i - 1].f) ++i;
  while (i < k.size() && k[i].f <= k[i - 1].f) ++i;
  t.unimodal = i == k.size();

  // Log-concave: positive on the open range and slopes nonincreasing across knots.
  bool interior_positive = true;
  for (std::size_t j = 1; j + 1 < k.size(); ++j) interior_positive = interior_positive && k[j].f > 0;
  bool concave = true;
  for (std::size_t j = 1; j + 1 < k.size(); ++j) {
    const double left = (k[j].f - k[j - 1].f) / (k[j].x - k[j - 1].x);
    const double right = (k[j + 1].f - k[j].f) / (k[j + 1].x - k[j].x);
    if (right > left + 1e-12 * std::max(1.0, std::abs(left))) concave = false;
  }
  t.log_concave_strict = interior_positive && concave && k.size() > 2;

  bool nonincreasing = true;
  for (std::size_t j = 1; j < k.size(); ++j) nonincreasing = nonincreasing && k[j].f <= k[j - 1].f;
  t.monotone_on_halfline = std::abs(k.front().x) <= 1e-12 && k.front().f > 0 && nonincreasing;
  return t;
}

}  // namespace

FamilyTraits classify(const Distribution& d) {
  return std::visit(overloaded{
                        [](const Gaussian&) { return FamilyTraits{.unimodal = true, .log_concave_strict = true}; },
                        [](const Exponential&) { return FamilyTraits{.monotone_on_halfline = true}; },
                        [](const Uniform&) { return FamilyTraits{.unimodal = true}; },
                        [](const PiecewiseDensity& p) { return classify_piecewise(p); },
                        [](const FiniteAtoms& a) {
                          return FamilyTraits{.discrete = true, .distinct_pairwise_distances = distinct_distances(a)};
                        },
                    },
                    d.variant());
}

double ks_statistic(std::span<const double> xs, const ShiftedDistribution& d) {
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = d.cdf(sorted[i]);
    worst = std::max({worst, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return worst;
}

}  // namespace threshq
