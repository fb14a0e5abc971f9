#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "qes/analysis/circular.hpp"
#include "qes/analysis/spectrum.hpp"
#include "qes/core/error.hpp"

namespace qes::analysis {

struct LockThresholds {
  double circular_variance = 0.05;  ///< GS mode: locked below this
  double peak_to_floor = 10.0;      ///< CW mode: a beat line must exceed this times the local spectral floor
  double peak_fraction = 0.01;      ///< ... and hold at least this share of the fluctuation power
  std::size_t min_cycles = 50;
  std::size_t guard_bins = 3;   ///< main-lobe half width excluded from the floor
  std::size_t floor_bins = 32;  ///< bins each side used for the floor
  double min_slips = 2.0;       ///< CW mode: net 2pi slips over the window that count as a beat

  friend bool operator==(const LockThresholds&, const LockThresholds&) = default;
};

struct LockResult {
  bool locked;
  double metric;        ///< circular variance (GS) or peak-to-floor ratio (CW)
  double beat_ghz;      ///< CW: signed frequency of the strongest line; 0 when locked
  double circular_variance;
  double mean_beat_ghz = 0.0;  ///< CW: net phase winding rate of the beat, signed
  double slips = 0.0;          ///< CW: net number of 2pi turns over the window
};

/// GS mode: per-pulse phases.
inline LockResult lock_classify_phases(const std::vector<double>& phases, const LockThresholds& th = {}) {
  if (phases.size() < th.min_cycles) throw DegenerateInputError("locking classification needs at least 50 cycles");
  const auto cs = circular_stats(phases);
  return {cs.variance < th.circular_variance, cs.variance, 0.0, cs.variance};
}

/// CW mode: complex beat e2 conj(e1) sampled every dt_ns. Unlocked iff the
/// mean-removed spectrum has a discrete line above the local floor, or the
/// relative phase keeps slipping (irregular slips smear the line but still beat).
inline LockResult lock_classify_beat(const std::vector<std::complex<double>>& beat, double dt_ns,
                                     const LockThresholds& th = {}) {
  if (beat.size() < th.min_cycles) throw DegenerateInputError("locking classification needs at least 50 samples");
  std::vector<double> ph(beat.size());
  for (std::size_t i = 0; i < beat.size(); ++i) ph[i] = std::arg(beat[i]);
  const double cv = circular_stats(ph).variance;
  double wind = 0.0;
  for (std::size_t i = 1; i < beat.size(); ++i) wind += std::arg(beat[i] * std::conj(beat[i - 1]));
  const double slips = wind / (2.0 * std::numbers::pi);
  const double span_ns = dt_ns * static_cast<double>(beat.size() - 1);
  const auto p = periodogram(beat, dt_ns);
  double total = 0.0, peak = 0.0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < p.power.size(); ++i) {
    total += p.power[i];
    if (p.power[i] > peak) {
      peak = p.power[i];
      at = i;
    }
  }
  // Floor = median of the neighbourhood outside the window's main lobe. A
  // locked pair leaves only a smooth noise pedestal, so the ratio stays small.
  const std::size_t n = p.power.size();
  std::vector<double> ring;
  for (std::size_t d = th.guard_bins + 1; d <= th.guard_bins + th.floor_bins; ++d) {
    ring.push_back(p.power[(at + d) % n]);
    ring.push_back(p.power[(at + n - d % n) % n]);
  }
  std::nth_element(ring.begin(), ring.begin() + static_cast<std::ptrdiff_t>(ring.size() / 2), ring.end());
  const double floor = ring[ring.size() / 2];
  const double ratio = floor > 0.0 ? peak / floor : (peak > 0.0 ? 1e300 : 0.0);
  const bool line = ratio > th.peak_to_floor && total > 0.0 && peak >= th.peak_fraction * total;
  const bool slipping = std::abs(slips) >= th.min_slips;
  const bool unlocked = line || slipping;
  return {!unlocked, ratio, line ? p.freq_ghz[at] : 0.0, cv, unlocked ? slips / span_ns : 0.0, slips};
}

}  // namespace qes::analysis
