#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "qes/core/error.hpp"

namespace qes::analysis {

struct Autocorrelation {
  std::vector<double> gamma;  ///< Gamma(k) = <x_i x_{i+k}> - <x>^2, k = 0..max_lag
  std::vector<double> rho;    ///< Gamma(k) / Gamma(0); empty when Gamma(0) <= 0
  double noise_floor = 0.0;   ///< 1 / sqrt(n)
  std::size_t n = 0;
};

inline double mean_of(const std::vector<double>& x) {
  long double s = 0.0L;
  for (double v : x) s += v;
  return static_cast<double>(s / static_cast<long double>(x.size()));
}

/// Raw Gamma(k) using the sample mean and 1/(n-k) normalisation; zero variance allowed.
inline std::vector<double> autocovariance(const std::vector<double>& x, std::size_t max_lag) {
  const std::size_t n = x.size();
  if (n <= max_lag) throw DegenerateInputError("autocorrelation needs more samples than max_lag");
  const double m = mean_of(x);
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = x[i] - m;
  std::vector<double> g(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    // four partial sums keep the loop vectorized without changing results across builds
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    const std::size_t len = n - k;
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
      s0 += c[i] * c[i + k];
      s1 += c[i + 1] * c[i + k + 1];
      s2 += c[i + 2] * c[i + k + 2];
      s3 += c[i + 3] * c[i + k + 3];
    }
    for (; i < len; ++i) s0 += c[i] * c[i + k];
    g[k] = ((s0 + s1) + (s2 + s3)) / static_cast<double>(len);
  }
  return g;
}

inline Autocorrelation autocorrelation(const std::vector<double>& x, std::size_t max_lag) {
  Autocorrelation r;
  r.n = x.size();
  r.gamma = autocovariance(x, max_lag);
  if (!(r.gamma[0] > 0.0)) throw DegenerateInputError("autocorrelation of a constant sequence");
  r.rho.resize(r.gamma.size());
  for (std::size_t k = 0; k < r.gamma.size(); ++k) r.rho[k] = r.gamma[k] / r.gamma[0];
  r.rho[0] = 1.0;
  r.noise_floor = 1.0 / std::sqrt(static_cast<double>(r.n));
  return r;
}

/// Gamma_x = Gamma_y - Gamma_n with y sampled inside the pulse and n off the pulse.
inline Autocorrelation noise_subtracted_autocorrelation(const std::vector<double>& in_pulse,
                                                        const std::vector<double>& off_pulse, std::size_t max_lag) {
  const auto gy = autocovariance(in_pulse, max_lag);
  if (!(gy[0] > 0.0)) throw DegenerateInputError("in-pulse samples are constant");
  const auto gn = autocovariance(off_pulse, max_lag);
  Autocorrelation r;
  r.n = in_pulse.size();
  r.noise_floor = 1.0 / std::sqrt(static_cast<double>(r.n));
  r.gamma.resize(gy.size());
  for (std::size_t k = 0; k < gy.size(); ++k) r.gamma[k] = gy[k] - gn[k];
  if (r.gamma[0] > 0.0) {
    r.rho.resize(r.gamma.size());
    for (std::size_t k = 0; k < r.gamma.size(); ++k) r.rho[k] = r.gamma[k] / r.gamma[0];
    r.rho[0] = 1.0;
  }
  return r;
}

}  // namespace qes::analysis
