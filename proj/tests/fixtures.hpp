// Scripted 16-cell examples with k = 2 and s = 3 (cell indices 0-based).
//
// Sets: {d1, d2} -> 1, {d3} -> 2, {d4} -> 3; nd1 and nd2 are non-members.

#pragma once

#include <array>
#include <string>
#include <utility>

#include "msf/hash_family.hpp"
#include "msf/shifting_filter.hpp"
#include "msf/spatial_filter.hpp"

namespace msf::test {

inline const std::string d1 = "d1", d2 = "d2", d3 = "d3", d4 = "d4", nd1 = "nd1", nd2 = "nd2";

inline constexpr HashFamilyConfig kFigureConfig{/*seed=*/42, /*k=*/2, /*s=*/3, /*m=*/16};

// Ordinals: 1, 2 index hashes; 3 offset of label 2; 4 offset of label 3.
inline DigestTable shifting_figure_table() {
  DigestTable t;
  auto put = [&](const std::string& e, std::uint64_t h1, std::uint64_t h2) {
    t.set(1, e, h1);
    t.set(2, e, h2);
  };
  auto offsets = [&](const std::string& e, std::uint64_t o2, std::uint64_t o3) {
    t.set(3, e, o2);
    t.set(4, e, o3);
  };
  put(d1, 0, 3);
  offsets(d1, 2, 3);
  put(d2, 5, 12);
  offsets(d2, 3, 2);
  put(d3, 5, 7);
  t.set(3, d3, 3);
  put(d4, 11, 13);
  t.set(4, d4, 2);
  put(nd1, 2, 8);
  offsets(nd1, 1, 3);
  put(nd2, 9, 12);
  offsets(nd2, 2, 3);
  return t;
}

inline DigestTable spatial_figure_table() {
  DigestTable t;
  auto put = [&](const std::string& e, std::uint64_t h1, std::uint64_t h2) {
    t.set(1, e, h1);
    t.set(2, e, h2);
  };
  put(d1, 0, 9);
  put(d2, 5, 12);
  put(d3, 5, 7);
  put(d4, 11, 12);
  put(nd1, 2, 9);
  put(nd2, 0, 12);
  return t;
}

inline const std::array<std::pair<std::string, Label>, 4>& figure_members() {
  static const std::array<std::pair<std::string, Label>, 4> members{
      {{d1, 1}, {d2, 1}, {d3, 2}, {d4, 3}}};
  return members;
}

inline ShiftingFilter shifting_figure_filter() {
  ShiftingFilter f(HashFamily::scripted(kFigureConfig, shifting_figure_table()), ShiftMode::circular, 0);
  for (const auto& [e, l] : figure_members()) f.insert(e, l);
  f.seal();
  return f;
}

inline SpatialFilter spatial_figure_filter() {
  SpatialFilter f(HashFamily::scripted(kFigureConfig, spatial_figure_table()));
  for (const auto& [e, l] : figure_members()) f.insert(e, l);
  f.seal();
  return f;
}

}  // namespace msf::test
