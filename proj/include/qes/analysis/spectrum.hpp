#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "qes/core/error.hpp"

namespace qes::analysis {

struct Periodogram {
  std::vector<double> freq_ghz;  ///< signed, ascending
  std::vector<double> power;
};

/// Hann-windowed periodogram of a complex series sampled every dt_ns, mean removed.
inline Periodogram periodogram(std::vector<std::complex<double>> x, double dt_ns) {
  const std::size_t n = x.size();
  if (n < 8) throw DegenerateInputError("periodogram needs at least 8 samples");
  std::complex<double> m = 0.0;
  for (auto v : x) m += v;
  m /= static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
    x[j] = (x[j] - m) * w;
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, x);
  Periodogram p;
  p.freq_ghz.resize(n);
  p.power.resize(n);
  const std::size_t half = n / 2;
  for (std::size_t i = 0; i < n; ++i) {
    // reorder so frequencies ascend from -fs/2
    const std::size_t k = (i + n - half) % n;
    const double kk = k < (n + 1) / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
    p.freq_ghz[i] = kk / (static_cast<double>(n) * dt_ns);
    p.power[i] = std::norm(spec[k]);
  }
  return p;
}

}  // namespace qes::analysis
