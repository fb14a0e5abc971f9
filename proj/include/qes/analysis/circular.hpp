#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qes/core/error.hpp"

namespace qes::analysis {

/// Wrap into [-pi, pi).
inline double wrap_phase(double x) noexcept {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::fmod(x + std::numbers::pi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  r -= std::numbers::pi;
  return r >= std::numbers::pi ? -std::numbers::pi : r;
}

struct CircularStats {
  double resultant_length;  ///< |mean of exp(i phi)|
  double variance;          ///< 1 - resultant_length
  double mean_direction;    ///< rad in [-pi, pi)
};

inline CircularStats circular_stats(const std::vector<double>& phases) {
  if (phases.size() < 2) throw DegenerateInputError("circular statistics need at least two phases");
  long double c = 0.0L, s = 0.0L;
  for (double p : phases) {
    c += std::cos(p);
    s += std::sin(p);
  }
  const double n = static_cast<double>(phases.size());
  const double cm = static_cast<double>(c) / n, sm = static_cast<double>(s) / n;
  const double r = std::min(1.0, std::hypot(cm, sm));
  return {r, 1.0 - r, wrap_phase(std::atan2(sm, cm))};
}

}  // namespace qes::analysis
