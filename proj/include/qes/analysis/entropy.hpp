#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qes/core/error.hpp"

namespace qes::analysis {

inline std::vector<std::uint64_t> code_counts(const std::vector<std::uint16_t>& codes, int bits) {
  std::vector<std::uint64_t> counts(std::size_t{1} << bits, 0);
  for (auto c : codes) {
    if (c >= counts.size()) throw ConfigError("code exceeds the declared width");
    ++counts[c];
  }
  return counts;
}

/// H_inf = -log2(max_i count_i / n), bits per sample.
inline double min_entropy(const std::vector<std::uint64_t>& counts) {
  std::uint64_t n = 0, mx = 0;
  for (auto c : counts) {
    n += c;
    mx = std::max(mx, c);
  }
  if (n == 0) throw DegenerateInputError("min-entropy of an empty histogram");
  const double h = -std::log2(static_cast<double>(mx) / static_cast<double>(n));
  return h <= 0.0 ? 0.0 : h;
}

}  // namespace qes::analysis
