#include "threshq/windows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>

#include "threshq/error.hpp"

namespace threshq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCenterTolerance = 1e-10;

bool fits_float(double diff, double width, bool closed) {
  const double tol = kLatticeTolerance * std::max(1.0, width);
  if (std::abs(diff - width) <= tol) return closed;
  return diff < width;
}

template <class Pred>
double bisect(double lo, double hi, Pred go_right) {
  for (int it = 0; it < 400 && hi - lo > kCenterTolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (go_right(mid))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

bool within_threshold(double dist, double delta, bool closed, double scale) {
  const double tol = kThresholdTolerance * std::max({1.0, std::abs(delta), std::abs(scale)});
  if (std::abs(dist - delta) <= tol) return closed;
  return dist < delta;
}

AtomWindow best_atom_window(const FiniteAtoms& atoms, double delta, const WindowOptions& opts) {
  if (!(delta > 0)) fail(ErrorCode::InvalidArgument, "delta must be positive");
  const auto& a = atoms.atoms();
  const auto& exact = atoms.exact_locations();
  const bool use_exact = exact.has_value() && opts.exact_delta.has_value();
  const double width = 2.0 * delta;

  auto fits = [&](std::size_t i, std::size_t j) {
    if (use_exact) {
      const Rational diff = (*exact)[j] - (*exact)[i];
      const Rational w = 2 * *opts.exact_delta;
      return opts.closed ? diff <= w : diff < w;
    }
    return fits_float(a[j].location - a[i].location, width, opts.closed);
  };

  AtomWindow best;
  best.mass = -1.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    j = std::max(j, i);
    while (j + 1 < a.size() && fits(i, j + 1)) ++j;
    double mass = 0.0;
    for (std::size_t k = i; k <= j; ++k) mass += a[k].mass;
    if (mass > best.mass) {
      best.first = i;
      best.last = j;
      best.mass = mass;
    }
  }
  if (use_exact) {
    best.exact_center = ((*exact)[best.first] + (*exact)[best.last]) / 2;
    best.center = to_double(*best.exact_center);
  } else {
    best.center = 0.5 * (a[best.first].location + a[best.last].location);
  }
  best.center_lo = a[best.last].location - delta;
  best.center_hi = a[best.first].location + delta;
  return best;
}

bool lattice_conflict(const FiniteAtoms& atoms, std::size_t i, std::size_t j, double delta,
                      const WindowOptions& opts) {
  if (i == j) return false;
  const auto& exact = atoms.exact_locations();
  if (exact && opts.exact_delta) {
    const Rational q = ((*exact)[j] - (*exact)[i]) / (2 * *opts.exact_delta);
    return q != 0 && is_integer(q);
  }
  const double q = (atoms.atoms()[j].location - atoms.atoms()[i].location) / (2.0 * delta);
  const double k = std::round(q);
  return k != 0.0 && std::abs(q - k) <= kLatticeTolerance * std::max(1.0, std::abs(q));
}

double unimodal_window_center(const Distribution& d, double delta) {
  if (d.is_discrete()) fail(ErrorCode::Domain, "unimodal window center needs a continuous law");
  const Interval eff = effective_support(d);
  const double m = mode(d);
  auto go_right = [&](double c) {
    const double up = pdf(d, c + delta);
    const double down = pdf(d, c - delta);
    if (up > down) return true;
    if (up < down) return false;
    if (c + delta <= m) return true;   // rising flank or left of the support
    if (c - delta >= m) return false;  // falling flank or right of the support
    return false;                      // straddles the mode: optimal, keep the lowest
  };
  return bisect(eff.lo - delta, eff.hi + delta, go_right);
}

double window_mass(const Distribution& d, double center, double delta) {
  return cdf(d, center + delta) - cdf(d, center - delta);
}

double orbit_window_center(const Distribution& d, std::span<const double> offsets, double delta) {
  if (d.is_discrete()) fail(ErrorCode::Domain, "orbit window needs a continuous law");
  if (offsets.empty()) fail(ErrorCode::InvalidArgument, "orbit window needs at least one sample");
  const auto [ymin, ymax] = std::minmax_element(offsets.begin(), offsets.end());
  const Interval sup = support(d);
  const double feasible_lo = sup.lo - *ymin;
  const double feasible_hi = sup.hi - *ymax;
  if (feasible_lo > feasible_hi)
    fail(ErrorCode::Domain, "samples are inconsistent with the density's support for every shift");

  auto log_h = [&](double t) {
    double acc = 0.0;
    for (double y : offsets) {
      const double lp = log_pdf(d, y + t);
      if (lp == -kInf) return -kInf;
      acc += lp;
    }
    return acc;
  };
  auto go_right = [&](double t) {
    const double up = log_h(t + delta);
    const double down = log_h(t - delta);
    if (up == -kInf && down == -kInf) return t + delta < feasible_lo;
    if (up == -kInf) return false;
    if (down == -kInf) return true;
    return up - down > 0;
  };
  const Interval eff = effective_support(d);
  const double lo = std::max(eff.lo - *ymax, feasible_lo) - delta;
  const double hi = std::min(eff.hi - *ymin, feasible_hi) + delta;
  return bisect(lo, hi, go_right);
}

double orbit_window_center_search(const Distribution& d, std::span<const double> offsets, double delta) {
  if (d.is_discrete()) fail(ErrorCode::Domain, "orbit window needs a continuous law");
  if (offsets.empty()) fail(ErrorCode::InvalidArgument, "orbit window needs at least one sample");
  const auto [ymin, ymax] = std::minmax_element(offsets.begin(), offsets.end());
  const Interval sup = support(d);
  if (sup.lo - *ymin > sup.hi - *ymax)
    fail(ErrorCode::Domain, "samples are inconsistent with the density's support for every shift");
  const Interval eff = effective_support(d);
  const double lo = std::max(eff.lo - *ymin, sup.lo - *ymin);
  const double hi = std::min(eff.hi - *ymax, sup.hi - *ymax);
  if (!(lo < hi)) return 0.5 * (lo + hi);

  // Tabulate h on a fine grid (scaled by its maximum), then scan window integrals.
  constexpr int kCells = 2000;
  const double step = (hi - lo) / kCells;
  std::vector<double> log_h(kCells + 1);
  double top = -kInf;
  for (int i = 0; i <= kCells; ++i) {
    double acc = 0.0;
    for (double y : offsets) acc += log_pdf(d, y + lo + i * step);
    log_h[i] = acc;
    top = std::max(top, acc);
  }
  if (top == -kInf) fail(ErrorCode::Domain, "likelihood vanishes for every shift");
  std::vector<double> cum(kCells + 1, 0.0);
  for (int i = 1; i <= kCells; ++i)
    cum[i] = cum[i - 1] + 0.5 * step * (std::exp(log_h[i - 1] - top) + std::exp(log_h[i] - top));
  auto integral_to = [&](double s) {
    if (s <= lo) return 0.0;
    if (s >= hi) return cum[kCells];
    const double pos = (s - lo) / step;
    const int i = std::min(kCells - 1, static_cast<int>(pos));
    return cum[i] + (cum[i + 1] - cum[i]) * (pos - i);
  };
  auto mass = [&](double t) { return integral_to(t + delta) - integral_to(t - delta); };

  double best_t = lo - delta;
  double best = -1.0;
  const double t_lo = lo - delta;
  const double t_hi = hi + delta;
  const int scan = kCells + static_cast<int>(2 * delta / step);
  const double t_step = (t_hi - t_lo) / scan;
  for (int i = 0; i <= scan; ++i) {
    const double t = t_lo + i * t_step;
    const double m = mass(t);
    if (m > best * (1 + 1e-12)) {
      best = m;
      best_t = t;
    }
  }
  // Brent polish around the best grid center.
  const auto [polished, neg] = boost::math::tools::brent_find_minima([&](double t) { return -mass(t); },
                                                                     best_t - t_step, best_t + t_step, 40);
  return -neg >= best ? polished : best_t;
}

}  // namespace threshq
