// Seeded hash family shared by the shifting and spatial filters.
//
// A family holds k index hashes (ordinals 1..k) and s-1 offset hashes
// (ordinals k+1..k+s-1). Every digest is a keyed 64-bit hash of the element
// bytes; the key is derived from (seed, ordinal). A scripted mode replaces the
// digests with a lookup table so tests can reproduce hand-drawn placements.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "msf/errors.hpp"

namespace msf {

using Label = std::uint32_t;

/// Identifies the digest construction below. Stored in filter images so a
/// decoder built with a different digest refuses to reconstruct the family.
inline constexpr std::uint8_t kDigestAlgorithmId = 1;

namespace detail {

inline constexpr std::uint64_t kP0 = 0xa0761d6478bd642fULL;
inline constexpr std::uint64_t kP1 = 0xe7037ed1a0b428dbULL;
inline constexpr std::uint64_t kP2 = 0x8ebc6af09c88c6e3ULL;
inline constexpr std::uint64_t kP3 = 0x589965cc75374cc3ULL;
inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t fmix64(std::uint64_t x) noexcept {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

inline std::uint64_t mum(std::uint64_t a, std::uint64_t b) noexcept {
  const unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
  return static_cast<std::uint64_t>(r) ^ static_cast<std::uint64_t>(r >> 64);
}

inline std::uint64_t load_le64(const char* p, std::size_t n) noexcept {
  std::uint64_t v = 0;
  std::memcpy(&v, p, n);
  if constexpr (std::endian::native == std::endian::big) {
    v = __builtin_bswap64(v);
  }
  return v;
}

}  // namespace detail

/// Keyed 64-bit digest of a byte string.
inline std::uint64_t keyed_digest(std::uint64_t key, std::string_view bytes) noexcept {
  const char* p = bytes.data();
  std::size_t n = bytes.size();
  std::uint64_t h = key ^ (static_cast<std::uint64_t>(n) * detail::kGolden);
  while (n >= 8) {
    h = detail::mum(h ^ detail::load_le64(p, 8) ^ detail::kP0, detail::kP1);
    p += 8;
    n -= 8;
  }
  if (n > 0) {
    h = detail::mum(h ^ detail::load_le64(p, n) ^ detail::kP2, detail::kP3);
  }
  return detail::fmix64(h ^ key);
}

/// Key of hash function `ordinal` in the family seeded with `seed`.
constexpr std::uint64_t ordinal_key(std::uint64_t seed, std::uint32_t ordinal) noexcept {
  return detail::fmix64(seed ^ detail::fmix64(ordinal * detail::kGolden + detail::kP0));
}

struct HashFamilyConfig {
  std::uint64_t seed = 0;
  std::uint32_t k = 1;
  std::uint32_t s = 1;
  std::uint64_t m = 2;

  void validate() const {
    if (k < 1) throw std::invalid_argument("hash family: k must be >= 1");
    if (s < 1) throw std::invalid_argument("hash family: s must be >= 1");
    if (m < 2) throw std::invalid_argument("hash family: m must be >= 2");
  }

  /// Number of distinct hash functions (k index + s-1 offset).
  std::uint32_t ordinals() const noexcept { return k + s - 1; }

  friend bool operator==(const HashFamilyConfig&, const HashFamilyConfig&) = default;
};

/// Scripted digests keyed by (ordinal, element). Values are reduced modulo the
/// family codomain on lookup, like real digests.
class DigestTable {
 public:
  void set(std::uint32_t ordinal, std::string element, std::uint64_t value) {
    table_[{ordinal, std::move(element)}] = value;
  }

  std::optional<std::uint64_t> find(std::uint32_t ordinal, std::string_view element) const {
    const auto it = table_.find(std::pair<std::uint32_t, std::string>{ordinal, std::string(element)});
    if (it == table_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const noexcept { return table_.size(); }
  bool empty() const noexcept { return table_.empty(); }

  auto begin() const { return table_.begin(); }
  auto end() const { return table_.end(); }

 private:
  std::map<std::pair<std::uint32_t, std::string>, std::uint64_t> table_;
};

/// Immutable after construction; safe for concurrent readers.
class HashFamily {
 public:
  explicit HashFamily(HashFamilyConfig config) : config_(config) {
    config_.validate();
    keys_.reserve(config_.ordinals());
    for (std::uint32_t ord = 1; ord <= config_.ordinals(); ++ord) {
      keys_.push_back(ordinal_key(config_.seed, ord));
    }
  }

  static HashFamily scripted(HashFamilyConfig config, DigestTable table) {
    HashFamily family(config);
    family.script_ = std::move(table);
    family.scripted_ = true;
    return family;
  }

  const HashFamilyConfig& config() const noexcept { return config_; }
  std::uint64_t seed() const noexcept { return config_.seed; }
  std::uint32_t k() const noexcept { return config_.k; }
  std::uint32_t s() const noexcept { return config_.s; }
  std::uint64_t m() const noexcept { return config_.m; }
  bool is_scripted() const noexcept { return scripted_; }
  const DigestTable& script() const noexcept { return script_; }

  /// Modulo reduction onto a codomain that is not a power of two favours the
  /// low residues by up to m / 2^64. Harmless at the sizes used here but
  /// reported so callers can warn.
  bool reduction_biased() const noexcept { return !std::has_single_bit(config_.m); }

  /// Raw 64-bit digest of hash function `ordinal` (1-based).
  std::uint64_t digest(std::uint32_t ordinal, std::string_view element) const {
    if (ordinal < 1 || ordinal > config_.ordinals()) {
      throw std::out_of_range("hash family: ordinal " + std::to_string(ordinal) + " out of range");
    }
    if (scripted_) {
      const auto v = script_.find(ordinal, element);
      if (!v) {
        throw ScriptError("hash family: no scripted digest for ordinal " + std::to_string(ordinal));
      }
      return *v;
    }
    return keyed_digest(keys_[ordinal - 1], element);
  }

  /// h_j(element) reduced to a cell index in [0, m). j is 1-based.
  std::uint64_t cell_index(std::uint32_t j, std::string_view element) const {
    if (j < 1 || j > config_.k) {
      throw std::out_of_range("hash family: index hash " + std::to_string(j) + " out of range");
    }
    if (element.empty()) throw std::invalid_argument("hash family: empty element");
    return digest(j, element) % config_.m;
  }

  /// Offset applied to the probes of `label`: 0 for label 1, otherwise the
  /// digest of offset hash (label-1) reduced modulo `bound` (or m when absent).
  std::uint64_t offset(Label label, std::string_view element,
                       std::optional<std::uint64_t> bound = std::nullopt) const {
    if (label < 1 || label > config_.s) {
      throw std::out_of_range("hash family: label " + std::to_string(label) + " out of range");
    }
    if (label == 1) return 0;
    const std::uint64_t range = bound.value_or(config_.m);
    if (range < 1) throw std::invalid_argument("hash family: offset bound must be >= 1");
    return digest(config_.k + label - 1, element) % range;
  }

  /// Ordinal of the offset hash used for `label` (> 1).
  std::uint32_t offset_ordinal(Label label) const noexcept { return config_.k + label - 1; }

 private:
  HashFamilyConfig config_;
  std::vector<std::uint64_t> keys_;
  DigestTable script_;
  bool scripted_ = false;
};

}  // namespace msf
