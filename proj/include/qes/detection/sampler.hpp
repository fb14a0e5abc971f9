#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "qes/core/error.hpp"
#include "qes/detection/trace.hpp"

namespace qes::detection {

enum class Interpolation { nearest, linear };

struct SamplingPolicy {
  double delay_ns = 9.5;  ///< from cycle start
  Interpolation interpolation = Interpolation::linear;

  void validate(double t_mod) const {
    if (!(delay_ns >= 0.0) || !(delay_ns < t_mod))
      throw ConfigError("sampling delay " + std::to_string(delay_ns) + " ns outside the cycle [0, " +
                        std::to_string(t_mod) + ")");
  }

  friend bool operator==(const SamplingPolicy&, const SamplingPolicy&) = default;
};

/// One value per analysed pulse.
struct SampleBatch {
  std::vector<double> values;
  std::vector<double> phases;         ///< optional, rad in [-pi, pi)
  std::vector<std::uint16_t> codes;   ///< optional
  std::vector<std::uint64_t> cycle;   ///< absolute cycle index of each value

  std::size_t size() const noexcept { return values.size(); }

  void append(const SampleBatch& o) {
    values.insert(values.end(), o.values.begin(), o.values.end());
    phases.insert(phases.end(), o.phases.begin(), o.phases.end());
    codes.insert(codes.end(), o.codes.begin(), o.codes.end());
    cycle.insert(cycle.end(), o.cycle.begin(), o.cycle.end());
  }

  friend bool operator==(const SampleBatch&, const SampleBatch&) = default;
};

/// Take the trace value at cycle_start + delay for every cycle.
inline std::vector<double> sample_per_pulse(const AnalogTrace& tr, const std::vector<double>& cycle_start_ns,
                                            double t_mod, const SamplingPolicy& policy) {
  policy.validate(t_mod);
  std::vector<double> out;
  out.reserve(cycle_start_ns.size());
  const double slack = 1e-9 * tr.dt;
  for (double c : cycle_start_ns) {
    const double t = c + policy.delay_ns;
    if (t < tr.t0 - slack || t > tr.t_end() + slack)
      throw ConfigError("sampling time " + std::to_string(t) + " ns outside the trace");
    out.push_back(policy.interpolation == Interpolation::linear ? interpolate_linear(tr, t)
                                                                : interpolate_nearest(tr, t));
  }
  return out;
}

}  // namespace qes::detection
