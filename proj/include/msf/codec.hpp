// Binary filter images.
//
//   offset  size  field
//        0     4  magic "MSF1"
//        4     1  version: low nibble format (1), high nibble digest algorithm
//        5     1  kind (1 = ShBF, 2 = SBF)
//        6     8  m
//       14     4  k
//       18     4  s
//       22     1  mode (0 = circular, 1 = word-bounded)
//       23     8  w (0 when unused)
//       31     8  seed
//       39     8  payload_len = ceil(m * cell_bits / 8)
//       47     -  payload: packed cells, LSB-first within each byte
//
// Integers are little-endian. The hash family is not stored; decode rebuilds
// it from (seed, k, s, m), so images are tied to the digest algorithm named in
// the version byte.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "msf/hash_family.hpp"
#include "msf/outcome.hpp"
#include "msf/packed_cells.hpp"
#include "msf/shifting_filter.hpp"
#include "msf/spatial_filter.hpp"

namespace msf::codec {

inline constexpr std::array<std::uint8_t, 4> kMagic = {'M', 'S', 'F', '1'};
inline constexpr std::uint8_t kFormatVersion = 1;
inline constexpr std::uint8_t kVersionByte = static_cast<std::uint8_t>(kDigestAlgorithmId << 4 | kFormatVersion);
inline constexpr std::size_t kHeaderSize = 47;

enum class ErrorCode : std::uint8_t {
  unsealed,
  bad_magic,
  unsupported_version,
  digest_mismatch,
  truncated,
  invalid_image,
};

class CodecError : public std::runtime_error {
 public:
  CodecError(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

using AnyFilter = std::variant<ShiftingFilter, SpatialFilter>;

namespace detail {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  std::size_t remaining() const noexcept { return in_.size() - pos_; }
  std::span<const std::uint8_t> rest() const noexcept { return in_.subspan(pos_); }

 private:
  std::uint64_t le(int n) {
    if (remaining() < static_cast<std::size_t>(n)) throw CodecError(ErrorCode::truncated, "codec: truncated header");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += n;
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

inline std::vector<std::uint8_t> encode_image(FilterKind kind, const HashFamilyConfig& cfg, ShiftMode mode,
                                              std::uint64_t w, const PackedCells& cells) {
  const auto payload = cells.to_bytes();
  Writer out;
  for (const auto b : kMagic) out.u8(b);
  out.u8(kVersionByte);
  out.u8(static_cast<std::uint8_t>(kind));
  out.u64(cfg.m);
  out.u32(cfg.k);
  out.u32(cfg.s);
  out.u8(static_cast<std::uint8_t>(mode));
  out.u64(w);
  out.u64(cfg.seed);
  out.u64(payload.size());
  out.bytes(payload);
  return out.take();
}

}  // namespace detail

inline std::vector<std::uint8_t> encode(const ShiftingFilter& f) {
  if (!f.sealed()) throw CodecError(ErrorCode::unsealed, "codec: filter must be sealed before encoding");
  return detail::encode_image(FilterKind::shbf, f.family().config(), f.mode(), f.word_size(), f.cells());
}

inline std::vector<std::uint8_t> encode(const SpatialFilter& f) {
  if (!f.sealed()) throw CodecError(ErrorCode::unsealed, "codec: filter must be sealed before encoding");
  return detail::encode_image(FilterKind::sbf, f.family().config(), ShiftMode::circular, 0, f.cells());
}

inline std::vector<std::uint8_t> encode(const AnyFilter& f) {
  return std::visit([](const auto& x) { return encode(x); }, f);
}

inline AnyFilter decode(std::span<const std::uint8_t> bytes) {
  using detail::Reader;
  Reader in(bytes);
  if (bytes.size() < kMagic.size()) throw CodecError(ErrorCode::truncated, "codec: image shorter than magic");
  for (const auto b : kMagic) {
    if (in.u8() != b) throw CodecError(ErrorCode::bad_magic, "codec: bad magic");
  }
  const std::uint8_t version = in.u8();
  if ((version & 0x0f) != kFormatVersion) {
    throw CodecError(ErrorCode::unsupported_version, "codec: unsupported format version " + std::to_string(version & 0x0f));
  }
  if ((version >> 4) != kDigestAlgorithmId) {
    throw CodecError(ErrorCode::digest_mismatch, "codec: image built with digest algorithm " + std::to_string(version >> 4));
  }
  const std::uint8_t kind = in.u8();
  const std::uint64_t m = in.u64();
  const std::uint32_t k = in.u32();
  const std::uint32_t s = in.u32();
  const std::uint8_t mode = in.u8();
  const std::uint64_t w = in.u64();
  const std::uint64_t seed = in.u64();
  const std::uint64_t payload_len = in.u64();

  auto invalid = [](const std::string& why) { return CodecError(ErrorCode::invalid_image, "codec: " + why); };
  if (kind != static_cast<std::uint8_t>(FilterKind::shbf) && kind != static_cast<std::uint8_t>(FilterKind::sbf)) {
    throw invalid("unknown filter kind " + std::to_string(kind));
  }
  if (m < 2 || k < 1 || s < 1) throw invalid("invalid filter parameters");
  if (mode > 1) throw invalid("unknown mode " + std::to_string(mode));
  const bool is_shbf = kind == static_cast<std::uint8_t>(FilterKind::shbf);
  if (!is_shbf && (mode != 0 || w != 0)) throw invalid("sbf image with shift mode");
  if (mode == 0 && w != 0) throw invalid("word size set in circular mode");
  if (mode == 1 && (w < 1 || w > m)) throw invalid("word size out of range");

  const unsigned width = is_shbf ? 1U : sbf_cell_bits(s);
  const unsigned __int128 expected = (static_cast<unsigned __int128>(m) * width + 7) / 8;
  if (expected != payload_len) throw invalid("payload length does not match m and cell width");
  if (in.remaining() < payload_len) throw CodecError(ErrorCode::truncated, "codec: truncated payload");
  if (in.remaining() > payload_len) throw invalid("trailing bytes after payload");

  PackedCells cells;
  try {
    cells = PackedCells::from_bytes(m, width, in.rest());
  } catch (const std::invalid_argument& e) {
    throw invalid(e.what());
  }

  HashFamily family({seed, k, s, m});
  if (is_shbf) {
    return ShiftingFilter::from_cells(std::move(family), static_cast<ShiftMode>(mode), w, std::move(cells));
  }
  try {
    return SpatialFilter::from_cells(std::move(family), std::move(cells));
  } catch (const std::invalid_argument& e) {
    throw invalid(e.what());
  }
}

}  // namespace msf::codec
