#include "threshq/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "threshq/error.hpp"

namespace threshq {

namespace {

constexpr double kSumsetLimit = 1e7;

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

void check_delta(double delta) {
  if (!(delta > 0)) fail(ErrorCode::InvalidArgument, "delta must be positive");
}

BoundReport generic_continuous_s(const Distribution& d, double delta) {
  const Interval eff = effective_support(d);
  const double lo = eff.lo - delta;
  const double hi = eff.hi + delta;
  constexpr int kGrid = 4000;
  const double step = (hi - lo) / kGrid;
  int best = 0;
  double best_mass = -1.0;
  for (int i = 0; i <= kGrid; ++i) {
    const double m = window_mass(d, lo + step * i, delta);
    if (m > best_mass) {
      best_mass = m;
      best = i;
    }
  }
  // Brent refinement inside the neighbouring grid cells.
  const auto [center, neg] = boost::math::tools::brent_find_minima(
      [&](double c) { return -window_mass(d, c, delta); }, lo + step * std::max(0, best - 1),
      lo + step * std::min(kGrid, best + 1), 40);
  BoundReport r;
  r.kind = BoundKind::S;
  r.n = 1;
  r.delta = delta;
  r.value = std::max(best_mass, -neg);
  r.witness_center = r.value == best_mass ? lo + step * best : center;
  r.method = "grid+brent";
  r.witness = "window center c* = " + fmt(*r.witness_center);
  return r;
}

}  // namespace

std::string to_string(BoundKind kind) { return kind == BoundKind::S ? "S" : "T"; }

BoundReport unavailable_bound(BoundKind kind, std::size_t n, double delta, std::string reason) {
  BoundReport r;
  r.kind = kind;
  r.n = n;
  r.delta = delta;
  r.available = false;
  r.value = 1.0;
  r.method = "unavailable: " + std::move(reason);
  return r;
}

BoundReport s_bound_one_sample(const Distribution& d, double delta, const WindowOptions& opts) {
  check_delta(delta);
  if (d.is_discrete()) {
    const FiniteAtoms& atoms = d.finite_atoms();
    const AtomWindow w = best_atom_window(atoms, delta, opts);
    BoundReport r;
    r.kind = BoundKind::S;
    r.n = 1;
    r.delta = delta;
    r.value = w.mass;
    r.method = opts.closed ? "sliding window (closed)" : "sliding window (open)";
    r.witness_center = w.center;
    for (std::size_t i = w.first; i <= w.last; ++i) r.witness_atoms.push_back(i);
    r.witness = "window center c* = " + (w.exact_center ? to_string(*w.exact_center) : fmt(w.center)) +
                " covering atoms " + fmt(atoms.atoms()[w.first].location) + ".." +
                fmt(atoms.atoms()[w.last].location);
    if (!opts.closed) {
      const BoundReport t = t_bound_one_sample_discrete(d, delta, opts);
      r.s_equals_t_certified = t.value == r.value;
    }
    return r;
  }
  const FamilyTraits traits = classify(d);
  if (!traits.unimodal && !traits.monotone_on_halfline) return generic_continuous_s(d, delta);
  const double center = unimodal_window_center(d, delta);
  BoundReport r;
  r.kind = BoundKind::S;
  r.n = 1;
  r.delta = delta;
  r.value = window_mass(d, center, delta);
  r.method = "unimodal root-finding";
  r.s_equals_t_certified = true;
  r.witness_center = center;
  r.witness = "window center c* = " + fmt(center);
  return r;
}

BoundReport t_bound_one_sample_discrete(const Distribution& d, double delta, const WindowOptions& opts) {
  check_delta(delta);
  const FiniteAtoms& atoms = d.finite_atoms();
  if (opts.closed)
    return unavailable_bound(BoundKind::T, 1, delta, "T is defined for the open-interval convention only");

  const std::size_t r = atoms.size();
  std::vector<std::size_t> parent(r);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j)
      if (lattice_conflict(atoms, i, j, delta, opts)) parent[find(j)] = find(i);

  std::vector<std::size_t> chosen;
  std::vector<bool> seen(r, false);
  for (std::size_t i = 0; i < r; ++i) {
    const std::size_t root = find(i);
    if (seen[root]) continue;
    seen[root] = true;
    std::size_t best = i;
    for (std::size_t j = i; j < r; ++j)
      if (find(j) == root && atoms.atoms()[j].mass > atoms.atoms()[best].mass) best = j;
    chosen.push_back(best);
  }
  std::sort(chosen.begin(), chosen.end());

  BoundReport out;
  out.kind = BoundKind::T;
  out.n = 1;
  out.delta = delta;
  for (auto i : chosen) out.value += atoms.atoms()[i].mass;
  out.method = "residue classes mod 2*delta";
  out.witness_atoms = chosen;
  out.witness = "B = {";
  for (std::size_t i = 0; i < chosen.size(); ++i)
    out.witness += (i ? ", " : "") + fmt(atoms.atoms()[chosen[i]].location);
  out.witness += "}";
  return out;
}

BoundReport t_bound_min_family(const Distribution& d, std::size_t n, double delta) {
  check_delta(delta);
  if (n == 0) fail(ErrorCode::InvalidArgument, "sample count must be at least 1");
  if (d.is_discrete() || !classify(d).monotone_on_halfline)
    fail(ErrorCode::Domain, "min-family bound needs a density decreasing on [0, inf) and zero below 0");
  const double tail = 1.0 - cdf(d, 2.0 * delta);
  BoundReport r;
  r.kind = BoundKind::T;
  r.n = n;
  r.delta = delta;
  r.value = 1.0 - std::pow(tail, static_cast<double>(n));
  r.method = "closed form 1-(1-F(2delta))^n";
  r.s_equals_t_certified = true;
  r.witness = "B = {x : 0 <= min(x) < " + fmt(2 * delta) + "}";
  return r;
}

BoundReport s_bound_log_concave(const Distribution& d, std::size_t n, double delta, const MCConfig& mc) {
  check_delta(delta);
  if (d.is_discrete() || !classify(d).log_concave_strict)
    fail(ErrorCode::Domain, "log-concave bound needs a strictly log-concave density");
  const Estimate est = quality_at(window_mle_estimator(d, delta), d, n, 0.0, delta, mc);
  BoundReport r;
  r.kind = BoundKind::S;
  r.n = n;
  r.delta = delta;
  r.value = est.q;
  r.ci_half_width = est.ci_half_width;
  r.method = "monte carlo quality of the window estimator";
  r.s_equals_t_certified = true;
  r.witness = "A = union over orbits of the maximal-likelihood 2*delta window";
  return r;
}

std::vector<BoundReport> applicable_bounds(const Distribution& d, std::size_t n, double delta, const MCConfig& mc,
                                           const WindowOptions& opts) {
  check_delta(delta);
  std::vector<BoundReport> out;
  const FamilyTraits traits = classify(d);
  if (d.is_discrete()) {
    if (n == 1) {
      out.push_back(s_bound_one_sample(d, delta, opts));
      out.push_back(t_bound_one_sample_discrete(d, delta, opts));
    } else if (traits.distinct_pairwise_distances &&
               std::pow(static_cast<double>(d.finite_atoms().size()), static_cast<double>(n)) <= 1e6) {
      BoundReport s;
      s.kind = BoundKind::S;
      s.n = n;
      s.delta = delta;
      s.value = exact_quality_discrete(discrete_n_sample_estimator(d, delta, n, opts), d, n, 0.0, delta,
                                       QualityOptions{opts.closed});
      s.method = "exact quality of the optimal atomic estimator";
      s.witness = "shift recovered whenever two samples differ";
      out.push_back(s);
      out.push_back(unavailable_bound(BoundKind::T, n, delta, "no algorithm for T with n > 1"));
    } else {
      out.push_back(unavailable_bound(BoundKind::S, n, delta, "atoms without distinct pairwise distances"));
      out.push_back(unavailable_bound(BoundKind::T, n, delta, "no algorithm for T with n > 1"));
    }
    return out;
  }
  if (traits.monotone_on_halfline) {
    BoundReport t = t_bound_min_family(d, n, delta);
    BoundReport s = t;
    s.kind = BoundKind::S;
    out.push_back(s);
    out.push_back(t);
  } else if (traits.log_concave_strict) {
    BoundReport s = s_bound_log_concave(d, n, delta, mc);
    BoundReport t = s;
    t.kind = BoundKind::T;
    out.push_back(s);
    out.push_back(t);
  } else if (n == 1) {
    BoundReport s = s_bound_one_sample(d, delta, opts);
    out.push_back(s);
    if (s.s_equals_t_certified) {
      s.kind = BoundKind::T;
      out.push_back(s);
    } else {
      out.push_back(unavailable_bound(BoundKind::T, n, delta, "T not certified for this family"));
    }
  } else {
    out.push_back(unavailable_bound(BoundKind::S, n, delta, "no algorithm for this family and n"));
    out.push_back(unavailable_bound(BoundKind::T, n, delta, "no algorithm for this family and n"));
  }
  return out;
}

namespace {

void check_sumset_limits(std::size_t r, std::size_t k) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "k must be at least 1");
  if (r == 0) fail(ErrorCode::InvalidArgument, "sumset needs at least one generator");
  if (r > 6) fail(ErrorCode::Limit, "sumset enumeration supports at most 6 generators");
  if (std::pow(static_cast<double>(k), static_cast<double>(r)) > kSumsetLimit)
    fail(ErrorCode::Limit, "sumset enumeration exceeds 10^7 combinations");
}

template <class T, class Emit>
void enumerate_combinations(std::span<const T> z, std::size_t k, Emit emit) {
  std::vector<std::size_t> h(z.size(), 0);
  while (true) {
    T v = T(0);
    for (std::size_t i = 0; i < z.size(); ++i) v += T(static_cast<long long>(h[i])) * z[i];
    emit(v);
    std::size_t pos = 0;
    while (pos < h.size() && ++h[pos] == k) h[pos++] = 0;
    if (pos == h.size()) return;
  }
}

std::vector<double> dedup(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > FiniteAtoms::kLocationTolerance * std::max(1.0, std::abs(x)))
      out.push_back(x);
  return out;
}

}  // namespace

std::vector<double> sumset_Yk(std::span<const double> z, std::size_t k) {
  check_sumset_limits(z.size(), k);
  std::vector<double> values;
  enumerate_combinations<double>(z, k, [&](double v) { values.push_back(v); });
  return dedup(std::move(values));
}

std::vector<Rational> sumset_Yk_exact(std::span<const Rational> z, std::size_t k) {
  check_sumset_limits(z.size(), k);
  std::set<Rational> values;
  enumerate_combinations<Rational>(z, k, [&](const Rational& v) { values.insert(v); });
  return {values.begin(), values.end()};
}

std::vector<double> sumset(std::span<const double> y, std::span<const double> z) {
  std::vector<double> values;
  values.reserve(y.size() * z.size());
  for (double a : y)
    for (double b : z) values.push_back(a + b);
  return dedup(std::move(values));
}

LemmaCheck lemma_bound_check(const RandomizedEstimator& e, const Distribution& d, double delta, std::size_t k,
                             const WindowOptions& opts) {
  check_delta(delta);
  const FiniteAtoms& atoms = d.finite_atoms();
  if (!e.accepts(1)) fail(ErrorCode::InvalidArgument, "lemma check needs a one-sample estimator");

  std::vector<double> y;
  std::size_t yz_size = 0;
  if (atoms.exact_locations() && opts.exact_delta) {
    const auto& z = *atoms.exact_locations();
    const std::vector<Rational> ye = sumset_Yk_exact(z, k);
    std::set<Rational> yz;
    for (const auto& a : ye)
      for (const auto& b : z) yz.insert(a + b);
    yz_size = yz.size();
    for (const auto& v : ye) y.push_back(to_double(v));
  } else {
    const std::vector<double> z = atoms.locations();
    y = sumset_Yk(z, k);
    yz_size = sumset(y, z).size();
  }

  LemmaCheck out;
  out.k = k;
  out.y_size = y.size();
  out.yz_size = yz_size;
  out.s_value = s_bound_one_sample(d, delta, opts).value;
  double total = 0.0;
  for (double theta : y) total += exact_quality_discrete(e, d, 1, theta, delta, QualityOptions{opts.closed});
  out.avg_quality = total / static_cast<double>(y.size());
  out.bound = out.s_value * static_cast<double>(yz_size) / static_cast<double>(y.size());
  out.holds = out.avg_quality <= out.bound + 1e-12;
  return out;
}

}  // namespace threshq
