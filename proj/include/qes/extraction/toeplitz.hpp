#pragma once

// Seeded Toeplitz hashing over GF(2).
//
// T is m x n with T[i][j] = seed[m - 1 + j - i]: the first row is
// seed[m-1 .. n+m-2] and the first column, read bottom to top, is seed[0 .. m-1].
// Row i is then the contiguous seed window starting at m - 1 - i, so each
// output bit is the parity of (window & x) and works a word at a time.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "qes/core/error.hpp"
#include "qes/core/rng.hpp"
#include "qes/extraction/bits.hpp"

namespace qes::extraction {

struct ExtractorConfig {
  std::size_t n = 0;        ///< input block length, bits
  std::size_t m = 0;        ///< output block length, bits
  BitVector seed;           ///< n + m - 1 bits
  double epsilon = 0x1.0p-32;

  void validate() const {
    if (!(m > 0 && m <= n)) throw ConfigError("extractor needs 0 < m <= n");
    if (seed.size() != n + m - 1) throw ConfigError("extractor seed must have n + m - 1 bits");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("extractor epsilon must lie in (0, 1)");
  }
};

/// Leftover-hash output length: floor(n h - 2 log2(1/eps)), at least 0.
inline std::size_t output_length(std::size_t n_bits, double h_min_per_bit, double epsilon) {
  if (!(h_min_per_bit > 0.0 && h_min_per_bit <= 1.0)) throw ConfigError("min-entropy per bit must lie in (0, 1]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  const double m = std::floor(static_cast<double>(n_bits) * h_min_per_bit - 2.0 * std::log2(1.0 / epsilon));
  return m <= 0.0 ? 0 : static_cast<std::size_t>(m);
}

inline BitVector toeplitz_extract(const BitVector& x, const BitVector& seed, std::size_t m) {
  const std::size_t n = x.size();
  if (m == 0 || n == 0 || seed.size() != n + m - 1) throw ConfigError("toeplitz: need seed length n + m - 1");
  const auto& xw = x.words();
  const std::size_t nw = xw.size();
  BitVector out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t base = m - 1 - i;
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < nw; ++w) acc ^= seed.window(base + 64 * w) & xw[w];
    out.set(i, std::popcount(acc) & 1);
  }
  return out;
}

/// Plain matrix form, used as a test oracle.
inline std::vector<std::uint8_t> toeplitz_reference(const std::vector<std::uint8_t>& x,
                                                    const std::vector<std::uint8_t>& seed, std::size_t m) {
  const std::size_t n = x.size();
  if (seed.size() != n + m - 1) throw ConfigError("toeplitz: need seed length n + m - 1");
  std::vector<std::uint8_t> out(m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i] ^= static_cast<std::uint8_t>(seed[m - 1 + j - i] & x[j]);
  return out;
}

/// Seed bits drawn from the extractor stream of `master_seed`.
inline BitVector random_seed_bits(std::uint64_t master_seed, std::size_t count, std::uint64_t index = 0) {
  auto rng = make_stream(master_seed, StreamDomain::extractor_seed, index, 0);
  BitVector v(count);
  for (auto& w : v.words()) w = rng();
  if (count & 63) v.words().back() &= (std::uint64_t{1} << (count & 63)) - 1;
  return v;
}

/// Hash every full n-bit block of `input` with the same seed; a trailing partial block is dropped.
inline BitVector extract_blocks(const BitVector& input, const ExtractorConfig& cfg) {
  cfg.validate();
  const std::size_t blocks = input.size() / cfg.n;
  BitVector out;
  for (std::size_t b = 0; b < blocks; ++b) out.append(toeplitz_extract(input.slice(b * cfg.n, cfg.n), cfg.seed, cfg.m));
  return out;
}

/// FNV-1a over the packed seed bytes and its length.
inline std::uint64_t seed_fingerprint(const BitVector& seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  for (auto b : seed.to_bytes()) mix(b);
  for (int s = 0; s < 64; s += 8) mix(static_cast<std::uint8_t>(seed.size() >> s));
  return h;
}

}  // namespace qes::extraction
