#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "qes/core/error.hpp"

namespace qes::detection {

/// Uniformly sampled real signal; value j is at t0 + j * dt.
struct AnalogTrace {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double time(std::size_t j) const noexcept { return t0 + static_cast<double>(j) * dt; }
  double t_end() const noexcept { return values.empty() ? t0 : time(values.size() - 1); }

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("trace sample interval must be > 0");
    for (double v : values)
      if (!std::isfinite(v)) throw ConfigError("trace contains non-finite values");
  }

  friend bool operator==(const AnalogTrace&, const AnalogTrace&) = default;
};

/// Linear interpolation at time t, clamped to the trace ends.
inline double interpolate_linear(const AnalogTrace& tr, double t) noexcept {
  if (tr.values.empty()) return 0.0;
  const double p = (t - tr.t0) / tr.dt;
  if (p <= 0.0) return tr.values.front();
  const double last = static_cast<double>(tr.values.size() - 1);
  if (p >= last) return tr.values.back();
  const auto i = static_cast<std::size_t>(p);
  const double w = p - static_cast<double>(i);
  if (w == 0.0) return tr.values[i];
  return tr.values[i] + w * (tr.values[i + 1] - tr.values[i]);
}

inline double interpolate_nearest(const AnalogTrace& tr, double t) noexcept {
  if (tr.values.empty()) return 0.0;
  const double p = std::round((t - tr.t0) / tr.dt);
  if (p <= 0.0) return tr.values.front();
  const auto i = static_cast<std::size_t>(p);
  return i >= tr.values.size() ? tr.values.back() : tr.values[i];
}

/// Resample onto a grid of interval new_dt starting at the same t0.
inline AnalogTrace resample_linear(const AnalogTrace& in, double new_dt) {
  if (!(new_dt > 0.0)) throw ConfigError("resample interval must be > 0");
  AnalogTrace out{in.t0, new_dt, {}};
  if (in.values.empty()) return out;
  const double span = in.dt * static_cast<double>(in.values.size() - 1);
  const auto n = static_cast<std::size_t>(std::floor(span / new_dt * (1.0 + 1e-12))) + 1;
  out.values.resize(n);
  const double ratio = new_dt / in.dt;
  for (std::size_t j = 0; j < n; ++j) {
    const double p = static_cast<double>(j) * ratio;
    const double pr = std::round(p);
    if (std::abs(p - pr) < 1e-9) {
      const auto i = static_cast<std::size_t>(pr);
      out.values[j] = in.values[i < in.values.size() ? i : in.values.size() - 1];
      continue;
    }
    const auto i = static_cast<std::size_t>(p);
    const double w = p - static_cast<double>(i);
    out.values[j] = i + 1 < in.values.size() ? in.values[i] + w * (in.values[i + 1] - in.values[i]) : in.values.back();
  }
  return out;
}

}  // namespace qes::detection
