#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "qes/core/error.hpp"
#include "qes/detection/trace.hpp"

namespace qes::detection {

struct DigitizerSpec {
  double rate_gsps = 50.0;
  int bits = 8;
  double v_min = -1.0;
  double v_max = 1.0;

  double interval_ns() const noexcept { return 1.0 / rate_gsps; }
  std::uint32_t levels() const noexcept { return 1u << bits; }

  void validate() const {
    if (!(rate_gsps > 0.0) || !std::isfinite(rate_gsps)) throw ConfigError("digitizer rate must be > 0");
    if (bits < 1 || bits > 16) throw ConfigError("digitizer bits must be in [1, 16]");
    if (!(v_min < v_max) || !std::isfinite(v_min) || !std::isfinite(v_max))
      throw ConfigError("digitizer full scale needs v_min < v_max");
  }

  friend bool operator==(const DigitizerSpec&, const DigitizerSpec&) = default;
};

/// Mid-rise uniform quantizer with clamping at both ends.
inline std::uint16_t quantize(double v, const DigitizerSpec& spec) noexcept {
  const double top = static_cast<double>(spec.levels() - 1);
  const double q = std::floor((v - spec.v_min) / (spec.v_max - spec.v_min) * static_cast<double>(spec.levels()));
  return static_cast<std::uint16_t>(std::clamp(q, 0.0, top));
}

struct CodeTrace {
  double t0 = 0.0;
  double dt = 0.0;
  int bits = 8;
  std::vector<std::uint16_t> codes;
  std::size_t clipped_low = 0;
  std::size_t clipped_high = 0;
};

struct ClipCounter {
  std::size_t low = 0, high = 0;
  void operator()(double v, const DigitizerSpec& s) noexcept {
    low += v < s.v_min;
    high += v > s.v_max;
  }
};

inline std::vector<std::uint16_t> quantize_all(const std::vector<double>& v, const DigitizerSpec& spec,
                                               ClipCounter* clips = nullptr) {
  spec.validate();
  std::vector<std::uint16_t> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    out[j] = quantize(v[j], spec);
    if (clips) (*clips)(v[j], spec);
  }
  return out;
}

/// Resample to the digitizer clock, then quantize.
inline CodeTrace digitize(const AnalogTrace& in, const DigitizerSpec& spec) {
  spec.validate();
  const AnalogTrace rs = resample_linear(in, spec.interval_ns());
  CodeTrace out{rs.t0, rs.dt, spec.bits, {}, 0, 0};
  ClipCounter clips;
  out.codes = quantize_all(rs.values, spec, &clips);
  out.clipped_low = clips.low;
  out.clipped_high = clips.high;
  return out;
}

/// Value at quantile q in [0, 1] with linear interpolation between order statistics.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw DegenerateInputError("quantile of an empty sample");
  q = std::clamp(q, 0.0, 1.0);
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double a = v[lo];
  if (hi == lo) return a;
  const double b = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
  return a + (pos - static_cast<double>(lo)) * (b - a);
}

/// Full scale spanning the [lo_pct, hi_pct] percentiles of a calibration sample.
inline DigitizerSpec percentile_full_scale(const std::vector<double>& calib, DigitizerSpec base, double lo_pct = 0.1,
                                           double hi_pct = 99.9) {
  base.v_min = quantile(calib, lo_pct / 100.0);
  base.v_max = quantile(calib, hi_pct / 100.0);
  if (!(base.v_min < base.v_max)) throw DegenerateInputError("calibration sample has no spread");
  return base;
}

}  // namespace qes::detection
