// Dense vector of fixed-width unsigned cells.
//
// Cell j occupies bits [j*width, (j+1)*width) of one little-endian bit stream;
// within each byte bits fill least-significant first. Cells may straddle
// 64-bit words. The byte image of the stream is what filter images store.

#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace msf {

class PackedCells {
 public:
  PackedCells() = default;

  PackedCells(std::uint64_t size, unsigned width) : size_(size), width_(width) {
    if (width < 1 || width > 32) throw std::invalid_argument("packed cells: width must be in [1, 32]");
    words_.assign(static_cast<std::size_t>((size * width + 63) / 64), 0);
    mask_ = (1ULL << width) - 1;
  }

  std::uint64_t size() const noexcept { return size_; }
  unsigned width() const noexcept { return width_; }
  std::uint64_t bit_length() const noexcept { return size_ * width_; }
  std::uint64_t max_value() const noexcept { return mask_; }

  std::uint64_t get(std::uint64_t i) const noexcept {
    const std::uint64_t pos = i * width_;
    const std::size_t w = static_cast<std::size_t>(pos >> 6);
    const unsigned off = static_cast<unsigned>(pos & 63);
    std::uint64_t v = words_[w] >> off;
    if (off + width_ > 64) v |= words_[w + 1] << (64 - off);
    return v & mask_;
  }

  void set(std::uint64_t i, std::uint64_t value) noexcept {
    const std::uint64_t pos = i * width_;
    const std::size_t w = static_cast<std::size_t>(pos >> 6);
    const unsigned off = static_cast<unsigned>(pos & 63);
    value &= mask_;
    words_[w] = (words_[w] & ~(mask_ << off)) | (value << off);
    if (off + width_ > 64) {
      const unsigned spill = 64 - off;
      words_[w + 1] = (words_[w + 1] & ~(mask_ >> spill)) | (value >> spill);
    }
  }

  // Single-bit fast paths for width-1 vectors.
  bool test_bit(std::uint64_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set_bit(std::uint64_t i) noexcept { words_[i >> 6] |= 1ULL << (i & 63); }

  std::uint64_t popcount() const noexcept {
    std::uint64_t total = 0;
    for (const auto w : words_) total += static_cast<std::uint64_t>(std::popcount(w));
    return total;
  }

  /// Number of cells holding a non-zero value.
  std::uint64_t nonzero_cells() const noexcept {
    if (width_ == 1) return popcount();
    std::uint64_t total = 0;
    for (std::uint64_t i = 0; i < size_; ++i) total += get(i) != 0;
    return total;
  }

  std::uint64_t byte_length() const noexcept { return (bit_length() + 7) / 8; }

  std::vector<std::uint8_t> to_bytes() const {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(byte_length()));
    for (std::size_t b = 0; b < out.size(); ++b) {
      out[b] = static_cast<std::uint8_t>(words_[b >> 3] >> ((b & 7) * 8));
    }
    return out;
  }

  /// Inverse of to_bytes(). Throws if the byte count is wrong or padding bits
  /// past the last cell are set.
  static PackedCells from_bytes(std::uint64_t size, unsigned width, std::span<const std::uint8_t> bytes) {
    PackedCells cells(size, width);
    if (bytes.size() != cells.byte_length()) throw std::invalid_argument("packed cells: byte length mismatch");
    for (std::size_t b = 0; b < bytes.size(); ++b) {
      cells.words_[b >> 3] |= static_cast<std::uint64_t>(bytes[b]) << ((b & 7) * 8);
    }
    const std::uint64_t used = cells.bit_length();
    if (used % 64 != 0 && !cells.words_.empty()) {
      const std::uint64_t tail_mask = ~((1ULL << (used % 64)) - 1);
      if (cells.words_.back() & tail_mask) throw std::invalid_argument("packed cells: non-zero padding bits");
    }
    return cells;
  }

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  friend bool operator==(const PackedCells&, const PackedCells&) = default;

 private:
  std::uint64_t size_ = 0;
  unsigned width_ = 1;
  std::uint64_t mask_ = 1;
  std::vector<std::uint64_t> words_;
};

}  // namespace msf
