// Generalized shifting Bloom filter (ShBF) for association queries over any
// number of disjoint sets.
//
// An element of set `label` sets the k bits
//     (h_j(element) + o_label(element)) mod m,   j = 1..k
// where o_1 = 0 and o_label is the digest of the set's offset hash. A query
// repeats the k probes once per label and reports every label whose probes are
// all set. Indexing is circular: there is no 2m-bit tail.
//
// Word-bounded mode limits offsets to [0, w) before the modular addition; with
// w = m it is identical to circular mode.

#pragma once

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

enum class ShiftMode : std::uint8_t { circular = 0, word_bounded = 1 };

class ShiftingFilter {
 public:
  /// Circular filter with a seeded hash family.
  ShiftingFilter(std::uint64_t m, std::uint32_t k, std::uint32_t s, std::uint64_t seed)
      : ShiftingFilter(HashFamily({seed, k, s, m}), ShiftMode::circular, 0) {}

  /// Word-bounded filter; offsets are reduced into [0, w).
  static ShiftingFilter word_bounded(std::uint64_t m, std::uint32_t k, std::uint32_t s, std::uint64_t w,
                                     std::uint64_t seed) {
    return ShiftingFilter(HashFamily({seed, k, s, m}), ShiftMode::word_bounded, w);
  }

  /// Filter over an injected (possibly scripted) family. `w` is ignored in
  /// circular mode and must be in [1, m] otherwise.
  ShiftingFilter(HashFamily family, ShiftMode mode, std::uint64_t w)
      : family_(std::move(family)), mode_(mode), w_(mode == ShiftMode::word_bounded ? w : 0) {
    if (mode_ == ShiftMode::word_bounded && (w_ < 1 || w_ > family_.m())) {
      throw std::invalid_argument("shbf: word size must satisfy 1 <= w <= m");
    }
    bits_ = PackedCells(family_.m(), 1);
  }

  std::uint64_t m() const noexcept { return family_.m(); }
  std::uint32_t k() const noexcept { return family_.k(); }
  std::uint32_t s() const noexcept { return family_.s(); }
  std::uint64_t seed() const noexcept { return family_.seed(); }
  ShiftMode mode() const noexcept { return mode_; }
  /// Offset bound; 0 in circular mode.
  std::uint64_t word_size() const noexcept { return w_; }
  /// Filter length in bits (one bit per cell).
  std::uint64_t bit_length() const noexcept { return m(); }

  const HashFamily& family() const noexcept { return family_; }
  const PackedCells& cells() const noexcept { return bits_; }
  const HashCounter& counters() const noexcept { return counters_; }
  void reset_counters() noexcept { counters_.reset(); }

  bool sealed() const noexcept { return sealed_; }
  void seal() noexcept { sealed_ = true; }

  bool bit(std::uint64_t i) const {
    if (i >= m()) throw std::out_of_range("shbf: bit index out of range");
    return bits_.test_bit(i);
  }
  std::uint64_t popcount() const noexcept { return bits_.popcount(); }
  double fill_ratio() const noexcept { return static_cast<double>(popcount()) / static_cast<double>(m()); }

  void insert(std::string_view element, Label label) {
    if (sealed_) throw SealedError("shbf: insert into sealed filter");
    check_label(label);
    const std::uint64_t off = offset(label, element);
    for (std::uint32_t j = 1; j <= k(); ++j) {
      bits_.set_bit(wrap(family_.cell_index(j, element) + off));
    }
    counters_.add({k() + (label > 1 ? 1U : 0U), 0, 0});
  }

  /// Candidate set Γ: every label whose k shifted probes are all 1.
  /// Computes exactly k + s - 1 digests; reads between s and s*k cells.
  CandidateSet query(std::string_view element) const {
    std::vector<std::uint64_t> base(k());
    for (std::uint32_t j = 1; j <= k(); ++j) base[j - 1] = family_.cell_index(j, element);

    CandidateSet gamma;
    std::uint64_t reads = 0;
    for (Label label = 1; label <= s(); ++label) {
      const std::uint64_t off = offset(label, element);
      bool all_set = true;
      for (const auto b : base) {
        ++reads;
        if (!bits_.test_bit(wrap(b + off))) {
          all_set = false;
          break;
        }
      }
      if (all_set) gamma.push_back(label);
    }
    counters_.add({static_cast<std::uint64_t>(k()) + s() - 1, reads, s()});
    return gamma;
  }

  /// Classifies a query against its ground truth (0 = non-member). Throws
  /// ConsistencyError on a false negative.
  QueryOutcome classify(std::string_view element, Label truth) const {
    if (truth > s()) throw std::out_of_range("shbf: true label out of range");
    QueryOutcome out;
    out.truth = truth;
    out.reported = query(element);
    if (truth == 0) {
      out.kind = out.reported.empty() ? OutcomeKind::true_negative : OutcomeKind::false_positive;
    } else if (!out.reported.contains(truth)) {
      throw ConsistencyError("shbf: false negative for label " + std::to_string(truth));
    } else {
      out.kind = out.reported.size() == 1 ? OutcomeKind::correct : OutcomeKind::multi_match;
    }
    return out;
  }

  /// Rebuilds a sealed filter from stored bits (used by the codec).
  static ShiftingFilter from_cells(HashFamily family, ShiftMode mode, std::uint64_t w, PackedCells bits) {
    ShiftingFilter f(std::move(family), mode, w);
    if (bits.size() != f.m() || bits.width() != 1) throw std::invalid_argument("shbf: cell vector shape mismatch");
    f.bits_ = std::move(bits);
    f.sealed_ = true;
    return f;
  }

  /// Same parameters and bits; counters and seal state are not compared.
  friend bool operator==(const ShiftingFilter& a, const ShiftingFilter& b) {
    return a.family_.config() == b.family_.config() && a.mode_ == b.mode_ && a.w_ == b.w_ && a.bits_ == b.bits_;
  }

 private:
  void check_label(Label label) const {
    if (label < 1 || label > s()) throw std::out_of_range("shbf: label " + std::to_string(label) + " out of range");
  }

  std::uint64_t offset(Label label, std::string_view element) const {
    if (mode_ == ShiftMode::word_bounded) return family_.offset(label, element, w_);
    return family_.offset(label, element);
  }

  // Both operands are < m, so one conditional subtraction suffices.
  std::uint64_t wrap(std::uint64_t i) const noexcept { return i >= m() ? i - m() : i; }

  HashFamily family_;
  ShiftMode mode_;
  std::uint64_t w_;
  PackedCells bits_;
  bool sealed_ = false;
  mutable HashCounter counters_;
};

}  // namespace msf
