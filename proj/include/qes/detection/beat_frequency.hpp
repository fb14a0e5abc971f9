#pragma once

#include <cstddef>
#include <vector>

#include "qes/detection/trace.hpp"

namespace qes::detection {

struct FrequencyPoint {
  double t_ns;
  double f_ghz;
};

/// Zero-crossing times of the trace, linearly interpolated between samples.
/// With hysteresis h > 0 a crossing only counts once the signal has moved from
/// below -h to above +h (or back); the reported time is the last raw crossing
/// before that, so slow noisy passages through zero count once.
inline std::vector<double> zero_crossings(const AnalogTrace& tr, double hysteresis = 0.0) {
  std::vector<double> out;
  int state = 0;  // -1 below -h, +1 above +h, 0 not yet known
  double pending = 0.0;
  for (std::size_t j = 0; j < tr.size(); ++j) {
    const double b = tr.values[j];
    if (j > 0) {
      const double a = tr.values[j - 1];
      if ((a < 0.0 && b >= 0.0) || (a >= 0.0 && b < 0.0)) pending = tr.time(j - 1) + a / (a - b) * tr.dt;
    }
    const int s = b > hysteresis ? 1 : (b < -hysteresis ? -1 : 0);
    if (hysteresis == 0.0 && s == 0) continue;
    if (s != 0 && s != state) {
      if (state != 0) out.push_back(pending);
      state = s;
    }
  }
  return out;
}

/// f = 1 / (2 dt) between successive crossings, reported at the interval midpoint.
/// Expects a mean-free trace; returns nothing with fewer than two crossings.
inline std::vector<FrequencyPoint> instantaneous_beat_frequency(const AnalogTrace& tr, double hysteresis = 0.0) {
  const auto zc = zero_crossings(tr, hysteresis);
  std::vector<FrequencyPoint> out;
  for (std::size_t k = 1; k < zc.size(); ++k) {
    const double d = zc[k] - zc[k - 1];
    if (d > 0.0) out.push_back({0.5 * (zc[k] + zc[k - 1]), 0.5 / d});
  }
  return out;
}

}  // namespace qes::detection
