#pragma once

#include <cmath>
#include <complex>

#include "qes/core/error.hpp"

namespace qes::detection {

using cplx = std::complex<double>;

struct PortIntensities {
  double plus;
  double minus;
};

/// 2x2 coupler with a 90 degree cross phase.
inline PortIntensities mmi_combine(cplx e1, cplx e2) noexcept {
  const cplx i{0.0, 1.0};
  return {0.5 * std::norm(e1 + i * e2), 0.5 * std::norm(i * e1 + e2)};
}

enum class Port { plus, minus, balanced, sum };

/// Detected photocurrent for one port choice (responsivity 1).
inline double port_signal(cplx e1, cplx e2, Port port) noexcept {
  // Closed forms of mmi_combine; the cross term is Im(e1 conj(e2)).
  const double i1 = std::norm(e1), i2 = std::norm(e2);
  const double cross = e1.imag() * e2.real() - e1.real() * e2.imag();
  switch (port) {
    case Port::plus: return 0.5 * (i1 + i2) + cross;
    case Port::minus: return 0.5 * (i1 + i2) - cross;
    case Port::balanced: return 2.0 * cross;
    case Port::sum: return i1 + i2;
  }
  return 0.0;
}

/// Two-beam interference: (i_cw + i_gs) + 2 sqrt(i_cw i_gs) cos(phase).
inline double beat_intensity_model(double i_cw, double i_gs, double phase) {
  if (i_cw < 0.0 || i_gs < 0.0) throw ConfigError("beat_intensity_model: intensities must be >= 0");
  return (i_cw + i_gs) + 2.0 * std::sqrt(i_cw * i_gs) * std::cos(phase);
}

}  // namespace qes::detection
