// Spatial Bloom filter (SBF): m multi-bit cells holding set labels 0..s.
//
// Inserting an element of set `label` raises each of its k cells to
// max(cell, label). A query returns 0 if any probed cell is 0 and otherwise the
// minimum probed value, which is the unique label i with some probe equal to i
// and every probe >= i.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "msf/counters.hpp"
#include "msf/errors.hpp"
#include "msf/hash_family.hpp"
#include "msf/outcome.hpp"
#include "msf/packed_cells.hpp"

namespace msf {

/// Bits per SBF cell: the smallest width whose 2^width values cover labels 0..s.
constexpr unsigned sbf_cell_bits(std::uint32_t s) noexcept {
  return static_cast<unsigned>(std::bit_width(s));
}

class SpatialFilter {
 public:
  SpatialFilter(std::uint64_t m, std::uint32_t k, std::uint32_t s, std::uint64_t seed)
      : SpatialFilter(HashFamily({seed, k, s, m})) {}

  explicit SpatialFilter(HashFamily family)
      : family_(std::move(family)), cells_(family_.m(), sbf_cell_bits(family_.s())) {}

  std::uint64_t m() const noexcept { return family_.m(); }
  std::uint32_t k() const noexcept { return family_.k(); }
  std::uint32_t s() const noexcept { return family_.s(); }
  std::uint64_t seed() const noexcept { return family_.seed(); }
  unsigned cell_bits() const noexcept { return cells_.width(); }
  /// Filter length in bits, m * cell_bits.
  std::uint64_t bit_length() const noexcept { return cells_.bit_length(); }

  const HashFamily& family() const noexcept { return family_; }
  const PackedCells& cells() const noexcept { return cells_; }
  const HashCounter& counters() const noexcept { return counters_; }
  void reset_counters() noexcept { counters_.reset(); }

  bool sealed() const noexcept { return sealed_; }
  void seal() noexcept { sealed_ = true; }

  /// Highest label inserted while insertions arrived in non-decreasing label
  /// order (the filter "state"); nullopt once that order was broken or when
  /// the filter was decoded from an image. 0 for a fresh filter.
  std::optional<Label> state() const noexcept { return state_; }

  Label cell(std::uint64_t i) const {
    if (i >= m()) throw std::out_of_range("sbf: cell index out of range");
    return static_cast<Label>(cells_.get(i));
  }

  std::vector<Label> cell_values() const {
    std::vector<Label> out(static_cast<std::size_t>(m()));
    for (std::uint64_t i = 0; i < m(); ++i) out[i] = static_cast<Label>(cells_.get(i));
    return out;
  }

  double fill_ratio() const noexcept {
    return static_cast<double>(cells_.nonzero_cells()) / static_cast<double>(m());
  }

  void insert(std::string_view element, Label label) {
    if (sealed_) throw SealedError("sbf: insert into sealed filter");
    if (label < 1 || label > s()) throw std::out_of_range("sbf: label " + std::to_string(label) + " out of range");
    for (std::uint32_t j = 1; j <= k(); ++j) {
      const std::uint64_t idx = family_.cell_index(j, element);
      if (cells_.get(idx) < label) cells_.set(idx, label);
    }
    if (state_ && label >= *state_) {
      state_ = label;
    } else {
      state_.reset();
    }
    counters_.add({k(), 0, 0});
  }

  /// Verdict in [0, s]. All k digests are computed; reading stops at the
  /// first zero cell.
  Label query(std::string_view element) const {
    std::vector<std::uint64_t> idx(k());
    for (std::uint32_t j = 1; j <= k(); ++j) idx[j - 1] = family_.cell_index(j, element);

    std::uint64_t reads = 0;
    Label verdict = 0;
    for (const auto i : idx) {
      ++reads;
      const auto v = static_cast<Label>(cells_.get(i));
      if (v == 0) {
        verdict = 0;
        break;
      }
      verdict = (reads == 1) ? v : std::min(verdict, v);
    }
    counters_.add({k(), reads, 1});
    return verdict;
  }

  /// Throws ConsistencyError when the verdict is below a non-zero truth,
  /// which max-overwrite makes impossible for an intact filter.
  QueryOutcome classify(std::string_view element, Label truth) const {
    if (truth > s()) throw std::out_of_range("sbf: true label out of range");
    const Label verdict = query(element);
    QueryOutcome out;
    out.truth = truth;
    if (verdict != 0) out.reported = {verdict};
    if (truth == 0) {
      out.kind = verdict == 0 ? OutcomeKind::true_negative : OutcomeKind::false_positive;
    } else if (verdict < truth) {
      throw ConsistencyError("sbf: verdict " + std::to_string(verdict) + " below true label " + std::to_string(truth));
    } else {
      out.kind = verdict == truth ? OutcomeKind::correct : OutcomeKind::inter_set_error;
    }
    return out;
  }

  /// Rebuilds a sealed filter from stored cells (used by the codec). Throws
  /// if any cell exceeds s.
  static SpatialFilter from_cells(HashFamily family, PackedCells cells) {
    SpatialFilter f(std::move(family));
    if (cells.size() != f.m() || cells.width() != f.cell_bits()) {
      throw std::invalid_argument("sbf: cell vector shape mismatch");
    }
    for (std::uint64_t i = 0; i < cells.size(); ++i) {
      if (cells.get(i) > f.s()) throw std::invalid_argument("sbf: cell value exceeds s");
    }
    f.cells_ = std::move(cells);
    f.sealed_ = true;
    f.state_.reset();
    return f;
  }

  friend bool operator==(const SpatialFilter& a, const SpatialFilter& b) {
    return a.family_.config() == b.family_.config() && a.cells_ == b.cells_;
  }

 private:
  HashFamily family_;
  PackedCells cells_;
  std::optional<Label> state_ = Label{0};
  bool sealed_ = false;
  mutable HashCounter counters_;
};

}  // namespace msf
