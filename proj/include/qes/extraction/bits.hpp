#pragma once

// Packed bit vectors. Bit k lives in word k / 64 at position k % 64.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "qes/core/error.hpp"

namespace qes::extraction {

class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t n) : words_((n + 63) / 64, 0), size_(n) {}

  static BitVector from_bools(const std::vector<std::uint8_t>& b) {
    BitVector v(b.size());
    for (std::size_t k = 0; k < b.size(); ++k) v.set(k, b[k] != 0);
    return v;
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }
  std::vector<std::uint64_t>& words() noexcept { return words_; }

  bool get(std::size_t k) const noexcept { return (words_[k >> 6] >> (k & 63)) & 1; }
  void set(std::size_t k, bool v) noexcept {
    const std::uint64_t m = std::uint64_t{1} << (k & 63);
    if (v) words_[k >> 6] |= m;
    else words_[k >> 6] &= ~m;
  }

  void push_back(bool v) {
    if ((size_ & 63) == 0) words_.push_back(0);
    ++size_;
    set(size_ - 1, v);
  }

  /// 64 bits starting at bit `k`; bits past the end read as zero.
  std::uint64_t window(std::size_t k) const noexcept {
    const std::size_t w = k >> 6, s = k & 63;
    const std::uint64_t lo = w < words_.size() ? words_[w] : 0;
    if (s == 0) return lo;
    const std::uint64_t hi = w + 1 < words_.size() ? words_[w + 1] : 0;
    return (lo >> s) | (hi << (64 - s));
  }

  /// Bits [begin, begin + n) as a new vector.
  BitVector slice(std::size_t begin, std::size_t n) const {
    if (begin + n > size_) throw ConfigError("bit slice out of range");
    BitVector out(n);
    for (std::size_t w = 0; w < out.words_.size(); ++w) out.words_[w] = window(begin + 64 * w);
    out.trim();
    return out;
  }

  void append(const BitVector& o) {
    for (std::size_t k = 0; k < o.size(); ++k) push_back(o.get(k));
  }

  std::size_t popcount() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  /// Bytes in little-endian word order, so byte j holds bits 8j..8j+7 LSB first.
  std::vector<std::uint8_t> to_bytes() const {
    std::vector<std::uint8_t> out((size_ + 7) / 8);
    for (std::size_t j = 0; j < out.size(); ++j)
      out[j] = static_cast<std::uint8_t>(words_[j / 8] >> (8 * (j % 8)));
    return out;
  }

  static BitVector from_bytes(const std::vector<std::uint8_t>& bytes, std::size_t n) {
    if (n > 8 * bytes.size()) throw ConfigError("bit count exceeds the byte buffer");
    BitVector v(n);
    for (std::size_t j = 0; j < (n + 7) / 8; ++j) v.words_[j / 8] |= std::uint64_t{bytes[j]} << (8 * (j % 8));
    v.trim();
    return v;
  }

  friend BitVector operator^(BitVector a, const BitVector& b) {
    if (a.size_ != b.size_) throw ConfigError("xor of bit vectors of different length");
    for (std::size_t w = 0; w < a.words_.size(); ++w) a.words_[w] ^= b.words_[w];
    return a;
  }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  void trim() noexcept {
    if (size_ & 63) words_.back() &= (std::uint64_t{1} << (size_ & 63)) - 1;
  }

  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

/// Concatenate `bits`-wide codes, each least-significant bit first.
inline BitVector pack_codes(const std::vector<std::uint16_t>& codes, int bits) {
  if (bits < 1 || bits > 16) throw ConfigError("code width must be in [1, 16]");
  BitVector v(codes.size() * static_cast<std::size_t>(bits));
  std::size_t k = 0;
  for (auto c : codes)
    for (int b = 0; b < bits; ++b) v.set(k++, (c >> b) & 1);
  return v;
}

}  // namespace qes::extraction
