#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "threshq/random.hpp"
#include "threshq/rational.hpp"

namespace threshq {

struct Gaussian {
  double mean = 0.0;
  double sigma = 1.0;
};

struct Exponential {
  double rate = 1.0;
};

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

struct Knot {
  double x;
  double f;
};

struct Atom {
  double location;
  double mass;
};

/// Linearly interpolated density table, zero outside [knots.front().x, knots.back().x].
class PiecewiseDensity {
 public:
  /// Validates the table and renormalizes it when its integral is within 1e-3 of one.
  /// Larger deviations are rejected.
  static PiecewiseDensity make(std::vector<Knot> knots);

  double pdf(double x) const;
  double cdf(double x) const;
  double quantile(double u) const;
  double mean() const;
  /// Location of the first maximal knot.
  double mode() const;

  double lo() const { return knots_.front().x; }
  double hi() const { return knots_.back().x; }
  const std::vector<Knot>& knots() const { return knots_; }

 private:
  std::vector<Knot> knots_;
  std::vector<double> cumulative_;  // mass to the left of each knot
};

/// Purely atomic law on finitely many points, stored sorted by location.
class FiniteAtoms {
 public:
  static constexpr double kLocationTolerance = 1e-9;

  /// `exact_locations`, when given, must be parallel to `atoms` and agree with
  /// their double locations; they enable exact window and lattice arithmetic.
  static FiniteAtoms make(std::vector<Atom> atoms,
                          std::optional<std::vector<Rational>> exact_locations = std::nullopt);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::optional<std::vector<Rational>>& exact_locations() const { return exact_; }
  std::vector<double> locations() const;
  std::size_t size() const { return atoms_.size(); }

  double cdf(double x) const;
  double quantile(double u) const;
  double mean() const;

 private:
  std::vector<Atom> atoms_;
  std::optional<std::vector<Rational>> exact_;
  std::vector<double> cumulative_;  // mass at or below each atom
};

class Distribution {
 public:
  using Variant = std::variant<Gaussian, Exponential, Uniform, PiecewiseDensity, FiniteAtoms>;

  static Distribution gaussian(double mean, double sigma);
  static Distribution exponential(double rate);
  static Distribution uniform(double lo, double hi);
  static Distribution piecewise(std::vector<Knot> knots);
  static Distribution atoms(std::vector<Atom> atoms,
                            std::optional<std::vector<Rational>> exact_locations = std::nullopt);

  const Variant& variant() const { return v_; }
  bool is_discrete() const { return std::holds_alternative<FiniteAtoms>(v_); }
  /// Atom view; throws Domain for continuous variants.
  const FiniteAtoms& finite_atoms() const;
  std::string describe() const;

 private:
  explicit Distribution(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

struct Interval {
  double lo;
  double hi;
};

/// Density; throws Domain for atomic laws.
double pdf(const Distribution& d, double x);
/// Log-density, -inf outside the support; throws Domain for atomic laws.
double log_pdf(const Distribution& d, double x);
double cdf(const Distribution& d, double x);
/// Inverse CDF for u in (0, 1).
double quantile(const Distribution& d, double u);
double mean(const Distribution& d);
/// Closed hull of the support (may be infinite).
Interval support(const Distribution& d);
/// Finite interval carrying all but a negligible amount of mass; used for brackets.
Interval effective_support(const Distribution& d);
/// A mode of a unimodal continuous law (first maximizer for plateaus).
double mode(const Distribution& d);

/// mu_theta: the base law translated by theta.
struct ShiftedDistribution {
  Distribution base;
  double theta = 0.0;

  double cdf(double x) const { return threshq::cdf(base, x - theta); }
};

/// Single inverse-CDF draw from the base law.
inline double draw(const Distribution& d, Rng& rng) { return quantile(d, rng.open_unit()); }

/// n draws from mu_theta, deterministic in the seed.
std::vector<double> sample(const ShiftedDistribution& d, std::uint64_t seed, std::size_t n);

struct FamilyTraits {
  bool unimodal = false;
  bool log_concave_strict = false;
  bool monotone_on_halfline = false;
  bool discrete = false;
  bool distinct_pairwise_distances = false;

  bool operator==(const FamilyTraits&) const = default;
};

FamilyTraits classify(const Distribution& d);

/// Kolmogorov-Smirnov statistic of `xs` against `d` (xs is copied and sorted).
double ks_statistic(std::span<const double> xs, const ShiftedDistribution& d);

}  // namespace threshq
