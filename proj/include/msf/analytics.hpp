// Closed-form error probabilities for both filters, the entropy metric and the
// per-query cost model.
//
// Everything is evaluated in long double. The Bloom kernel
//     (1 - (1 - 1/m)^(k n))^k
// is computed as (-expm1(k n log1p(-1/m)))^k so that large parameters
// (m = 2^23, k n ~ 6.5e5) keep full relative precision.

#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "msf/outcome.hpp"

namespace msf::analytics {

using Real = long double;

struct FilterParams {
  std::uint64_t m = 2;
  std::uint32_t k = 1;
  std::uint32_t s = 1;
  std::uint64_t n = 0;
  /// Per-set sizes n_1..n_s; required by the SBF formulas.
  std::optional<std::vector<std::uint64_t>> counts;

  static FilterParams uniform(std::uint64_t m, std::uint32_t k, std::uint32_t s, std::uint64_t per_set) {
    return {m, k, s, per_set * s, std::vector<std::uint64_t>(s, per_set)};
  }

  static FilterParams with_counts(std::uint64_t m, std::uint32_t k, std::vector<std::uint64_t> counts) {
    const auto n = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    const auto s = static_cast<std::uint32_t>(counts.size());
    return {m, k, s, n, std::move(counts)};
  }

  void validate() const {
    if (m < 1) throw std::invalid_argument("analytics: m must be >= 1");
    if (k < 1) throw std::invalid_argument("analytics: k must be >= 1");
    if (s < 1) throw std::invalid_argument("analytics: s must be >= 1");
    if (counts) {
      if (counts->size() != s) throw std::invalid_argument("analytics: counts must have s entries");
      if (std::accumulate(counts->begin(), counts->end(), std::uint64_t{0}) != n) {
        throw std::invalid_argument("analytics: counts must sum to n");
      }
    }
  }

  const std::vector<std::uint64_t>& require_counts() const {
    if (!counts) throw std::invalid_argument("analytics: per-set counts required");
    return *counts;
  }

  /// Σ_{j >= i} n_j (1-based i; 0 for i > s).
  std::uint64_t tail(std::uint32_t i) const {
    const auto& c = require_counts();
    std::uint64_t sum = 0;
    for (std::uint32_t j = std::max<std::uint32_t>(i, 1); j <= s; ++j) sum += c[j - 1];
    return sum;
  }

  /// Elements inserted after the filter reaches state i: Σ_{j > i} n_j.
  std::uint64_t fill(std::uint32_t i) const { return tail(i + 1); }
};

/// Probability that one cell is still 0 after k*n uniform writes, (1-1/m)^(kn).
inline Real empty_cell_probability(std::uint64_t m, std::uint32_t k, std::uint64_t n) {
  if (m < 1) throw std::invalid_argument("analytics: m must be >= 1");
  if (k < 1) throw std::invalid_argument("analytics: k must be >= 1");
  if (m == 1) return n == 0 ? 1.0L : 0.0L;
  return std::exp(static_cast<Real>(k) * static_cast<Real>(n) * std::log1p(-1.0L / static_cast<Real>(m)));
}

/// Classic Bloom false-positive probability (1 - (1-1/m)^(kn))^k.
inline Real bf_fpp(std::uint64_t m, std::uint32_t k, std::uint64_t n) {
  if (m < 1) throw std::invalid_argument("analytics: m must be >= 1");
  if (k < 1) throw std::invalid_argument("analytics: k must be >= 1");
  if (n == 0) return 0.0L;
  if (m == 1) return 1.0L;
  const Real occupied =
      -std::expm1(static_cast<Real>(k) * static_cast<Real>(n) * std::log1p(-1.0L / static_cast<Real>(m)));
  return std::pow(occupied, static_cast<Real>(k));
}

namespace detail {

// 1 - (1 - p)^trials without cancellation for tiny p.
inline Real at_least_one(Real p, std::uint64_t trials) {
  if (trials == 0 || p <= 0) return 0.0L;
  if (p >= 1) return 1.0L;
  return -std::expm1(static_cast<Real>(trials) * std::log1p(-p));
}

}  // namespace detail

/// Probability that one particular set is reported for a non-member.
inline Real shbf_fpp_specific(const FilterParams& p) {
  p.validate();
  return bf_fpp(p.m, p.k, p.n);
}

/// Probability that a non-member yields a non-empty candidate set.
inline Real shbf_fpp_overall(const FilterParams& p) {
  return detail::at_least_one(shbf_fpp_specific(p), p.s);
}

/// Probability that a member's candidate set holds more than one label.
inline Real shbf_isep(const FilterParams& p) {
  return detail::at_least_one(shbf_fpp_specific(p), p.s - 1);
}

/// Probability that a member's candidate set has exactly `i` labels: the
/// binomial pmf of i-1 spurious matches among s-1 lookups.
inline Real shbf_isep_cardinality(const FilterParams& p, std::uint32_t i) {
  if (i < 1 || i > p.s) throw std::out_of_range("analytics: cardinality must be in [1, s]");
  const Real f = shbf_fpp_specific(p);
  const std::uint32_t trials = p.s - 1;
  const std::uint32_t hits = i - 1;
  if (f <= 0) return hits == 0 ? 1.0L : 0.0L;
  if (f >= 1) return hits == trials ? 1.0L : 0.0L;
  const Real log_binom = std::lgamma(static_cast<Real>(trials) + 1) - std::lgamma(static_cast<Real>(hits) + 1) -
                         std::lgamma(static_cast<Real>(trials - hits) + 1);
  return std::exp(log_binom + static_cast<Real>(hits) * std::log(f) +
                  static_cast<Real>(trials - hits) * std::log1p(-f));
}

/// Probability that a non-member is reported as a member of set i. Uses the
/// telescoped form K(Σ_{j>=i} n_j) - K(Σ_{j>i} n_j) of the recursive
/// definition, K being the Bloom kernel.
inline Real sbf_fpp_specific(const FilterParams& p, std::uint32_t i) {
  p.validate();
  if (i < 1 || i > p.s) throw std::out_of_range("analytics: label must be in [1, s]");
  const Real v = bf_fpp(p.m, p.k, p.tail(i)) - bf_fpp(p.m, p.k, p.tail(i + 1));
  return v < 0 ? 0.0L : v;
}

/// Overall SBF false-positive probability (same kernel as a plain Bloom filter).
inline Real sbf_fpp(const FilterParams& p) {
  p.validate();
  return bf_fpp(p.m, p.k, p.n);
}

/// Probability that a member of set i is attributed to another set.
inline Real sbf_isep_specific(const FilterParams& p, std::uint32_t i) {
  p.validate();
  if (i < 1 || i > p.s) throw std::out_of_range("analytics: label must be in [1, s]");
  return bf_fpp(p.m, p.k, p.fill(i));
}

/// Set-size weighted mean of the set-specific inter-set error probabilities.
inline Real sbf_isep_overall(const FilterParams& p) {
  p.validate();
  const auto& c = p.require_counts();
  if (p.n == 0) return 0.0L;
  Real sum = 0;
  std::uint64_t after = 0;  // Σ_{j>i} n_j, built from the top label down
  for (std::uint32_t i = p.s; i >= 1; --i) {
    sum += static_cast<Real>(c[i - 1]) * bf_fpp(p.m, p.k, after);
    after += c[i - 1];
  }
  return sum / static_cast<Real>(p.n);
}

/// Average information per member query: 1 for a correct answer, 0 for a
/// wrong single label, 1/u for a u-way ambiguity.
inline Real entropy(const OutcomeTally& tally) {
  const std::uint64_t total = tally.member_queries();
  if (total == 0) throw std::invalid_argument("analytics: entropy needs at least one member query");
  Real info = static_cast<Real>(tally.c);
  for (std::size_t i = 2; i < tally.u.size(); ++i) {
    info += static_cast<Real>(tally.u[i]) / static_cast<Real>(i);
  }
  return info / static_cast<Real>(total);
}

struct QueryCost {
  std::uint64_t lookups_per_query;
  std::uint64_t hashes_per_query;
  std::uint64_t cells_read_min;
  std::uint64_t cells_read_max;

  friend bool operator==(const QueryCost&, const QueryCost&) = default;
};

inline QueryCost cost_model(FilterKind kind, std::uint32_t k, std::uint32_t s) {
  if (k < 1 || s < 1) throw std::invalid_argument("analytics: cost model needs k, s >= 1");
  if (kind == FilterKind::shbf) {
    return {s, static_cast<std::uint64_t>(k) + s - 1, s, static_cast<std::uint64_t>(s) * k};
  }
  return {1, k, 1, k};
}

}  // namespace msf::analytics
