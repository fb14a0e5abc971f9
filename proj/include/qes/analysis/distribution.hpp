#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "qes/core/error.hpp"
#include "qes/detection/digitizer.hpp"

namespace qes::analysis {

struct Histogram {
  std::vector<double> edges;  ///< bins + 1 edges
  std::vector<std::uint64_t> counts;
  std::uint64_t below = 0, above = 0;

  std::uint64_t total() const noexcept {
    std::uint64_t s = below + above;
    for (auto c : counts) s += c;
    return s;
  }
};

/// Equal-width bins on [lo, hi]; the last bin is closed. Out-of-range values are tallied separately.
inline Histogram histogram(const std::vector<double>& v, std::size_t bins, double lo, double hi) {
  if (bins == 0 || !(lo < hi)) throw ConfigError("histogram needs bins > 0 and lo < hi");
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  h.counts.assign(bins, 0);
  const double scale = static_cast<double>(bins) / (hi - lo);
  for (double x : v) {
    if (x < lo) {
      ++h.below;
    } else if (x > hi) {
      ++h.above;
    } else {
      auto b = static_cast<std::size_t>((x - lo) * scale);
      if (b >= bins) b = bins - 1;
      ++h.counts[b];
    }
  }
  return h;
}

/// CDF of the arcsine law on [-1, 1]: (2/pi) asin(sqrt((x+1)/2)).
inline double arcsine_cdf(double x) noexcept {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 2.0 / std::numbers::pi * std::asin(std::sqrt(0.5 * (x + 1.0)));
}

/// sup |F_n - F| for a sorted sample.
template <class Cdf>
double ks_statistic_sorted(const std::vector<double>& sorted, Cdf&& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max(d, std::max(static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n));
  }
  return d;
}

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
inline double kolmogorov_q(double lambda) noexcept {
  if (lambda < 1e-3) return 1.0;
  if (lambda < 1.18) {
    // small-lambda form converges faster here
    const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
    const double s = std::sqrt(2.0 * std::numbers::pi) / lambda * (y + std::pow(y, 9) + std::pow(y, 25) + std::pow(y, 49));
    return std::clamp(1.0 - s, 0.0, 1.0);
  }
  double sum = 0.0, sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
  double distance;
  double p_value;
};

inline KsResult ks_test(std::vector<double> v, const auto& cdf) {
  if (v.empty()) throw DegenerateInputError("KS test of an empty sample");
  std::sort(v.begin(), v.end());
  const double d = ks_statistic_sorted(v, cdf);
  const double sn = std::sqrt(static_cast<double>(v.size()));
  return {d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)};
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DegenerateInputError("two-sample KS needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

struct ArcsineFit {
  double distance;
  double p_value;
  std::vector<double> normalized;  ///< samples mapped so the percentile band spans [-1, 1]
  double lo, hi;                   ///< percentile values used for the map
};

/// Rescale by the robust band [lo_pct, hi_pct] and test against the arcsine law.
inline ArcsineFit arcsine_ks(const std::vector<double>& samples, double lo_pct = 0.5, double hi_pct = 99.5) {
  if (samples.size() < 100) throw DegenerateInputError("arcsine test needs at least 100 samples");
  const double lo = detection::quantile(samples, lo_pct / 100.0);
  const double hi = detection::quantile(samples, hi_pct / 100.0);
  if (!(hi > lo)) throw DegenerateInputError("arcsine test of a constant sample");
  ArcsineFit r{0.0, 0.0, std::vector<double>(samples.size()), lo, hi};
  for (std::size_t i = 0; i < samples.size(); ++i) r.normalized[i] = -1.0 + 2.0 * (samples[i] - lo) / (hi - lo);
  const auto ks = ks_test(r.normalized, arcsine_cdf);
  r.distance = ks.distance;
  r.p_value = ks.p_value;
  return r;
}

}  // namespace qes::analysis
