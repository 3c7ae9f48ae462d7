#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "threshq/distributions.hpp"
#include "threshq/rational.hpp"

namespace threshq {

/// Comparison rules shared by the window, lattice and quality computations.
struct WindowOptions {
  bool closed = false;                   // [c - delta, c + delta] instead of (c - delta, c + delta)
  std::optional<Rational> exact_delta;   // used together with exact atom locations
};

/// Relative tolerance for window-width and 2*delta lattice tests on doubles.
inline constexpr double kLatticeTolerance = 1e-9;
/// Tolerance for |estimate - theta| against delta on doubles.
inline constexpr double kThresholdTolerance = 1e-12;

/// Success test for an estimate at distance `dist` from the truth. Values within
/// kThresholdTolerance * scale of delta are treated as lying on the boundary.
bool within_threshold(double dist, double delta, bool closed, double scale = 1.0);

/// Maximal-mass window over a sorted atom set. Among maximal windows the leftmost
/// wins; `center` is the midpoint of the feasible center interval.
struct AtomWindow {
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive
  double mass = 0.0;
  double center = 0.0;
  double center_lo = 0.0;  // feasible centers span (center_lo, center_hi), closed when WindowOptions::closed
  double center_hi = 0.0;
  std::optional<Rational> exact_center;
};

AtomWindow best_atom_window(const FiniteAtoms& atoms, double delta, const WindowOptions& opts = {});

/// True when b - a is a nonzero integer multiple of 2*delta under the lattice rule.
bool lattice_conflict(const FiniteAtoms& atoms, std::size_t i, std::size_t j, double delta,
                      const WindowOptions& opts = {});

/// Center c maximizing F(c + delta) - F(c - delta) for a unimodal (or half-line
/// monotone) continuous law. Bisection on the sign of f(c + delta) - f(c - delta);
/// ties on a plateau resolve to the lowest root.
double unimodal_window_center(const Distribution& d, double delta);

/// Mass of the window centered at c (continuous laws).
double window_mass(const Distribution& d, double center, double delta);

/// For offsets y (y[0] == 0), the center t maximizing the integral of
/// h(t) = prod_i f(y_i + t) over (t - delta, t + delta). Requires log h concave;
/// bisection on g(t) = log h(t + delta) - log h(t - delta), lowest root on plateaus.
double orbit_window_center(const Distribution& d, std::span<const double> offsets, double delta);

/// Same maximization without the log-concavity assumption: tabulates h on a
/// 2000-cell grid, scans window integrals, and polishes the best center by
/// Brent minimization. Lowest maximizer on ties (up to the grid).
double orbit_window_center_search(const Distribution& d, std::span<const double> offsets, double delta);

}  // namespace threshq
