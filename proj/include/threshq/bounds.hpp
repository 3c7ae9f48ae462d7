#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "threshq/distributions.hpp"
#include "threshq/estimators.hpp"
#include "threshq/quality.hpp"
#include "threshq/windows.hpp"

namespace threshq {

/// S: ceiling for shift-invariant estimators. T: ceiling for every (randomized) estimator.
enum class BoundKind { S, T };

std::string to_string(BoundKind kind);

struct BoundReport {
  BoundKind kind = BoundKind::S;
  std::size_t n = 1;
  double delta = 0.0;
  double value = 0.0;
  double ci_half_width = 0.0;  // nonzero when the value is a Monte Carlo estimate
  bool available = true;
  bool s_equals_t_certified = false;
  std::string method;
  std::string witness;
  std::optional<double> witness_center;
  std::vector<std::size_t> witness_atoms;  // indices into the sorted atom list
};

/// Bound that the artifact refuses to compute for this family/n.
BoundReport unavailable_bound(BoundKind kind, std::size_t n, double delta, std::string reason);

/// S_{mu,1} = max_c mu((c - delta, c + delta)). Exact sliding window for atoms,
/// root-finding for unimodal or half-line monotone densities, grid plus Brent
/// refinement otherwise.
BoundReport s_bound_one_sample(const Distribution& d, double delta, const WindowOptions& opts = {});

/// T_{mu,1} for atoms: one atom per class of the relation "differs by a nonzero
/// multiple of 2 delta", heaviest atom of each class.
BoundReport t_bound_one_sample_discrete(const Distribution& d, double delta, const WindowOptions& opts = {});

/// T_{mu,n} = 1 - (1 - F(2 delta))^n for half-line monotone densities, where S = T.
BoundReport t_bound_min_family(const Distribution& d, std::size_t n, double delta);

/// S_{mu,n} = T_{mu,n} for strictly log-concave densities, estimated as the Monte
/// Carlo quality of the window estimator (which attains it).
BoundReport s_bound_log_concave(const Distribution& d, std::size_t n, double delta, const MCConfig& mc);

/// Every S/T bound the module can certify for (d, n); the rest are reported unavailable.
std::vector<BoundReport> applicable_bounds(const Distribution& d, std::size_t n, double delta, const MCConfig& mc,
                                           const WindowOptions& opts = {});

/// Y_k = { h_1 z_1 + ... + h_r z_r : 0 <= h_i < k }, sorted and deduplicated.
/// Limits: r <= 6 and k^r <= 10^7.
std::vector<double> sumset_Yk(std::span<const double> z, std::size_t k);
std::vector<Rational> sumset_Yk_exact(std::span<const Rational> z, std::size_t k);

/// { y + z }, sorted and deduplicated with the same tolerance as sumset_Yk.
std::vector<double> sumset(std::span<const double> y, std::span<const double> z);

struct LemmaCheck {
  std::size_t k = 0;
  std::size_t y_size = 0;
  std::size_t yz_size = 0;
  double s_value = 0.0;
  double avg_quality = 0.0;
  double bound = 0.0;  // S * |Y_k + Z| / |Y_k|
  bool holds = false;
};

/// Exact average of Q^theta(e) over theta in Y_k against S * |Y_k + Z| / |Y_k|.
LemmaCheck lemma_bound_check(const RandomizedEstimator& e, const Distribution& d, double delta, std::size_t k,
                             const WindowOptions& opts = {});

}  // namespace threshq
