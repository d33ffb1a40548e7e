// Seeded test corpora: labelled datasets (uniform or multinomial set sizes)
// and disjoint non-element sets, plus their line-oriented text format
//
//     <hex element>\t<label>      (dataset entry)
//     <hex element>               (non-element)

#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "msf/errors.hpp"
#include "msf/hash_family.hpp"

namespace msf::workload {

inline constexpr std::size_t kElementBytes = 16;

struct Entry {
  std::string element;
  Label label = 0;

  friend bool operator==(const Entry&, const Entry&) = default;
};

struct Dataset {
  std::vector<Entry> entries;
  std::uint32_t s = 0;
  std::vector<std::uint64_t> per_set_counts;  // index label-1
  std::uint64_t seed = 0;

  std::uint64_t size() const noexcept { return entries.size(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct NonElementSet {
  std::vector<std::string> elements;
  std::uint64_t seed = 0;

  std::uint64_t size() const noexcept { return elements.size(); }
};

namespace detail {

// Stream salts so datasets and non-elements drawn from the same seed differ.
inline constexpr std::uint64_t kDatasetSalt = 0x5d4e3c2b1a090807ULL;
inline constexpr std::uint64_t kNonElementSalt = 0x1f2e3d4c5b6a7988ULL;

inline constexpr int kMaxRedraws = 64;

inline std::string random_element(std::mt19937_64& rng) {
  std::string out(kElementBytes, '\0');
  for (std::size_t i = 0; i < kElementBytes; i += 8) {
    const std::uint64_t v = rng();
    for (std::size_t b = 0; b < 8; ++b) out[i + b] = static_cast<char>(v >> (8 * b));
  }
  return out;
}

// Portable uniform draw in [0, bound) (multiply-shift; bias < bound / 2^64).
inline std::uint64_t below(std::mt19937_64& rng, std::uint64_t bound) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(rng()) * bound) >> 64);
}

// Draws `count` fresh elements not present in `seen`, adding them to it.
inline std::vector<std::string> unique_elements(std::mt19937_64& rng, std::size_t count,
                                                std::unordered_set<std::string>& seen) {
  std::vector<std::string> out;
  out.reserve(count);
  while (out.size() < count) {
    auto e = random_element(rng);
    if (seen.insert(e).second) out.push_back(std::move(e));
  }
  return out;
}

}  // namespace detail

/// s sets of exactly `per_set` elements each, ordered by label.
inline Dataset gen_uniform(std::uint32_t s, std::uint64_t per_set, std::uint64_t seed) {
  if (s < 1 || per_set < 1) throw std::invalid_argument("workload: uniform needs s >= 1 and per_set >= 1");
  std::mt19937_64 rng(seed ^ detail::kDatasetSalt);
  std::unordered_set<std::string> seen;
  auto elements = detail::unique_elements(rng, static_cast<std::size_t>(s * per_set), seen);

  Dataset d{{}, s, std::vector<std::uint64_t>(s, per_set), seed};
  d.entries.reserve(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    d.entries.push_back({std::move(elements[i]), static_cast<Label>(i / per_set + 1)});
  }
  return d;
}

/// `total` elements, each assigned an independent uniform label; splits that
/// leave a set empty are redrawn (up to 64 times, then repaired). Entries are
/// ordered by label.
inline Dataset gen_random(std::uint32_t s, std::uint64_t total, std::uint64_t seed) {
  if (s < 1 || total < s) throw std::invalid_argument("workload: random needs s >= 1 and total >= s");
  std::mt19937_64 rng(seed ^ detail::kDatasetSalt);
  std::unordered_set<std::string> seen;
  auto elements = detail::unique_elements(rng, static_cast<std::size_t>(total), seen);

  std::vector<Label> labels(elements.size());
  std::vector<std::uint64_t> counts;
  auto has_empty = [&] { return std::find(counts.begin(), counts.end(), 0) != counts.end(); };
  for (int attempt = 0; attempt < detail::kMaxRedraws && (attempt == 0 || has_empty()); ++attempt) {
    counts.assign(s, 0);
    for (auto& l : labels) {
      l = static_cast<Label>(detail::below(rng, s) + 1);
      ++counts[l - 1];
    }
  }
  // When total is close to s nearly every split leaves a set empty; move
  // randomly chosen elements from sets that can spare one.
  for (std::uint32_t empty = 0; empty < s; ++empty) {
    while (counts[empty] == 0) {
      auto& l = labels[detail::below(rng, labels.size())];
      if (counts[l - 1] < 2) continue;
      --counts[l - 1];
      l = empty + 1;
      ++counts[empty];
    }
  }

  Dataset d{{}, s, std::move(counts), seed};
  d.entries.reserve(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) d.entries.push_back({std::move(elements[i]), labels[i]});
  std::stable_sort(d.entries.begin(), d.entries.end(),
                   [](const Entry& a, const Entry& b) { return a.label < b.label; });
  return d;
}

/// `count` unique elements, none of which appears in `exclude`.
inline NonElementSet gen_non_elements(std::uint64_t count, std::uint64_t seed, const Dataset& exclude) {
  if (count < 1) throw std::invalid_argument("workload: non-element count must be >= 1");
  std::mt19937_64 rng(seed ^ detail::kNonElementSalt);
  std::unordered_set<std::string> seen;
  seen.reserve(exclude.entries.size() + static_cast<std::size_t>(count));
  for (const auto& e : exclude.entries) seen.insert(e.element);
  return {detail::unique_elements(rng, static_cast<std::size_t>(count), seen), seed};
}

// ---------------------------------------------------------------------------
// Text format

inline std::string to_hex(std::string_view bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (const unsigned char c : bytes) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 15]);
  }
  return out;
}

inline std::string from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.empty() || hex.size() % 2 != 0) throw DataError("malformed hex element '" + std::string(hex) + "'");
  std::string out(hex.size() / 2, '\0');
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = nibble(hex[2 * i]);
    const int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw DataError("malformed hex element '" + std::string(hex) + "'");
    out[i] = static_cast<char>(hi << 4 | lo);
  }
  return out;
}

/// One parsed line of the text format; label 0 when the line has none.
struct TextRecord {
  std::string element;
  Label label = 0;
};

inline std::vector<TextRecord> read_records(std::istream& in) {
  std::vector<TextRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    TextRecord rec;
    try {
      rec.element = from_hex(std::string_view(line).substr(0, tab));
      if (tab != std::string::npos) {
        const std::string label = line.substr(tab + 1);
        std::size_t used = 0;
        const unsigned long v = std::stoul(label, &used);
        if (used != label.size() || v == 0 || v > 0xffffffffUL) throw DataError("bad label '" + label + "'");
        rec.label = static_cast<Label>(v);
      }
    } catch (const std::logic_error&) {
      throw DataError("line " + std::to_string(lineno) + ": malformed label");
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(std::move(rec));
  }
  return out;
}

/// Reads a labelled dataset; s is the largest label seen.
inline Dataset read_dataset(std::istream& in) {
  Dataset d;
  for (auto& rec : read_records(in)) {
    if (rec.label == 0) throw DataError("dataset entry without label");
    if (rec.label > d.s) {
      d.s = rec.label;
      d.per_set_counts.resize(d.s, 0);
    }
    ++d.per_set_counts[rec.label - 1];
    d.entries.push_back({std::move(rec.element), rec.label});
  }
  return d;
}

inline void write_dataset(std::ostream& out, const Dataset& d) {
  for (const auto& e : d.entries) out << to_hex(e.element) << '\t' << e.label << '\n';
}

inline void write_non_elements(std::ostream& out, const NonElementSet& ne) {
  for (const auto& e : ne.elements) out << to_hex(e) << '\n';
}

inline NonElementSet read_non_elements(std::istream& in) {
  NonElementSet ne;
  for (auto& rec : read_records(in)) {
    if (rec.label != 0) throw DataError("non-element line carries a label");
    ne.elements.push_back(std::move(rec.element));
  }
  return ne;
}

}  // namespace msf::workload
