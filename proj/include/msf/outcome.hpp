// Query verdicts and their classification against ground truth.

#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string_view>
#include <vector>

#include "msf/hash_family.hpp"

namespace msf {

/// Labels reported by a shifting-filter query, ascending and duplicate-free.
/// Empty means "not in any set".
class CandidateSet {
 public:
  CandidateSet() = default;
  CandidateSet(std::initializer_list<Label> labels) : labels_(labels) {
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
  }

  /// Appends a label greater than every label already present.
  void push_back(Label label) {
    if (!labels_.empty() && label <= labels_.back()) {
      *this = with(label);
      return;
    }
    labels_.push_back(label);
  }

  bool contains(Label label) const { return std::binary_search(labels_.begin(), labels_.end(), label); }
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  auto begin() const noexcept { return labels_.begin(); }
  auto end() const noexcept { return labels_.end(); }

  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;

 private:
  CandidateSet with(Label label) const {
    CandidateSet out = *this;
    out.labels_.insert(std::lower_bound(out.labels_.begin(), out.labels_.end(), label), label);
    out.labels_.erase(std::unique(out.labels_.begin(), out.labels_.end()), out.labels_.end());
    return out;
  }

  std::vector<Label> labels_;
};

enum class FilterKind : std::uint8_t { shbf = 1, sbf = 2 };

constexpr std::string_view to_string(FilterKind kind) noexcept {
  return kind == FilterKind::shbf ? "shbf" : "sbf";
}

enum class OutcomeKind : std::uint8_t {
  true_negative,
  false_positive,
  correct,
  multi_match,      // ShBF: |Γ| > 1 with the true label among them
  inter_set_error,  // SBF: a single, wrong label
};

constexpr std::string_view to_string(OutcomeKind kind) noexcept {
  switch (kind) {
    case OutcomeKind::true_negative: return "true-negative";
    case OutcomeKind::false_positive: return "false-positive";
    case OutcomeKind::correct: return "correct";
    case OutcomeKind::multi_match: return "multi-match";
    case OutcomeKind::inter_set_error: return "inter-set-error";
  }
  return "unknown";
}

struct QueryOutcome {
  OutcomeKind kind = OutcomeKind::true_negative;
  Label truth = 0;  // 0: not a member of any set
  CandidateSet reported;

  /// Number of labels the filter returned (u for a multi-match).
  std::size_t ambiguity() const noexcept { return reported.size(); }
};

/// Counts of classified outcomes. u[i] is the number of member queries that
/// returned exactly i candidate labels (i >= 2); lower indices stay zero.
struct OutcomeTally {
  std::uint64_t c = 0;
  std::uint64_t e = 0;
  std::vector<std::uint64_t> u;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;

  std::uint64_t u_at(std::size_t cardinality) const noexcept {
    return cardinality < u.size() ? u[cardinality] : 0;
  }

  /// Multi-matches with cardinality >= `from`.
  std::uint64_t u_from(std::size_t from) const noexcept {
    std::uint64_t total = 0;
    for (std::size_t i = std::max<std::size_t>(from, 2); i < u.size(); ++i) total += u[i];
    return total;
  }

  std::uint64_t multi_matches() const noexcept { return u_from(2); }
  std::uint64_t member_queries() const noexcept { return c + e + multi_matches(); }
  std::uint64_t non_member_queries() const noexcept { return fp + tn; }

  void add_multi(std::size_t cardinality, std::uint64_t count = 1) {
    if (u.size() <= cardinality) u.resize(cardinality + 1, 0);
    u[cardinality] += count;
  }

  void record(const QueryOutcome& outcome) {
    switch (outcome.kind) {
      case OutcomeKind::true_negative: ++tn; break;
      case OutcomeKind::false_positive: ++fp; break;
      case OutcomeKind::correct: ++c; break;
      case OutcomeKind::inter_set_error: ++e; break;
      case OutcomeKind::multi_match: add_multi(outcome.ambiguity()); break;
    }
  }

  void merge(const OutcomeTally& other) {
    c += other.c;
    e += other.e;
    fp += other.fp;
    tn += other.tn;
    for (std::size_t i = 0; i < other.u.size(); ++i) {
      if (other.u[i] != 0) add_multi(i, other.u[i]);
    }
  }
};

}  // namespace msf
