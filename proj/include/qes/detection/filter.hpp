#pragma once

// Cascades of identical first-order sections, bilinear transform with the
// cutoff prewarped so the -3 dB point of one section lands exactly on it.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "qes/core/error.hpp"
#include "qes/detection/trace.hpp"

namespace qes::detection {

enum class FilterKind { lowpass, highpass };

struct FilterSpec {
  FilterKind kind = FilterKind::lowpass;
  double cutoff_ghz = 20.0;
  int order = 1;

  void validate() const {
    if (!(cutoff_ghz > 0.0) || !std::isfinite(cutoff_ghz)) throw ConfigError("filter cutoff must be > 0");
    if (order < 1) throw ConfigError("filter order must be >= 1");
  }

  friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

struct OnePoleCoeffs {
  double b0, b1, a1;  // y[n] = b0 x[n] + b1 x[n-1] - a1 y[n-1]

  static OnePoleCoeffs design(const FilterSpec& spec, double dt_ns) {
    spec.validate();
    const double fs = 1.0 / dt_ns;
    if (!(spec.cutoff_ghz < 0.5 * fs))
      throw ConfigError("filter cutoff " + std::to_string(spec.cutoff_ghz) + " GHz is not below Nyquist " +
                        std::to_string(0.5 * fs) + " GHz");
    const double k = std::tan(std::numbers::pi * spec.cutoff_ghz / fs);
    const double a1 = (k - 1.0) / (k + 1.0);
    if (spec.kind == FilterKind::lowpass) return {k / (1.0 + k), k / (1.0 + k), a1};
    return {1.0 / (1.0 + k), -1.0 / (1.0 + k), a1};
  }
};

/// Streaming cascade; primed so the first input is treated as a settled DC level.
class FilterCascade {
 public:
  FilterCascade(const FilterSpec& spec, double dt_ns) : c_(OnePoleCoeffs::design(spec, dt_ns)), kind_(spec.kind) {
    xp_.assign(static_cast<std::size_t>(spec.order), 0.0);
    yp_.assign(static_cast<std::size_t>(spec.order), 0.0);
  }

  double operator()(double x) noexcept {
    if (!primed_) prime(x);
    for (std::size_t s = 0; s < xp_.size(); ++s) {
      const double y = c_.b0 * x + c_.b1 * xp_[s] - c_.a1 * yp_[s];
      xp_[s] = x;
      yp_[s] = y;
      x = y;
    }
    return x;
  }

 private:
  void prime(double x0) noexcept {
    double level = x0;
    for (std::size_t s = 0; s < xp_.size(); ++s) {
      xp_[s] = level;
      level = kind_ == FilterKind::lowpass ? level : 0.0;
      yp_[s] = level;
    }
    primed_ = true;
  }

  OnePoleCoeffs c_;
  FilterKind kind_;
  std::vector<double> xp_, yp_;
  bool primed_ = false;
};

inline AnalogTrace apply_filter(const AnalogTrace& in, const FilterSpec& spec) {
  FilterCascade f(spec, in.dt);
  AnalogTrace out{in.t0, in.dt, std::vector<double>(in.size())};
  for (std::size_t j = 0; j < in.size(); ++j) out.values[j] = f(in.values[j]);
  return out;
}

/// Magnitude response of the cascade at frequency f_ghz.
inline double filter_gain(const FilterSpec& spec, double dt_ns, double f_ghz) {
  const auto c = OnePoleCoeffs::design(spec, dt_ns);
  const double w = 2.0 * std::numbers::pi * f_ghz * dt_ns;
  const std::complex<double> z = std::polar(1.0, -w);
  const auto h = (c.b0 + c.b1 * z) / (1.0 + c.a1 * z);
  return std::pow(std::abs(h), spec.order);
}

}  // namespace qes::detection
