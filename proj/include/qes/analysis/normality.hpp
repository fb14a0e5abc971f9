#pragma once

// D'Agostino-Pearson omnibus test built from the skewness and kurtosis z-scores
// (D'Agostino 1970; Anscombe & Glynn 1983).

#include <cmath>
#include <cstddef>
#include <vector>

#include "qes/core/error.hpp"

namespace qes::analysis {

struct Moments {
  double skewness;  ///< g1 = m3 / m2^1.5
  double kurtosis;  ///< b2 = m4 / m2^2 (3 for a normal law)
};

inline Moments sample_moments(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  long double s = 0.0L;
  for (double v : x) s += v;
  const double m = static_cast<double>(s / static_cast<long double>(n));
  long double m2 = 0.0L, m3 = 0.0L, m4 = 0.0L;
  for (double v : x) {
    const long double d = v - m;
    const long double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (!(m2 > 0.0L)) throw DegenerateInputError("normality test of a constant sample");
  return {static_cast<double>(m3 / std::pow(m2, 1.5L)), static_cast<double>(m4 / (m2 * m2))};
}

inline double skewness_z(double g1, double n) {
  double y = g1 * std::sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)));
  const double beta2 =
      3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0) / ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
  const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
  const double delta = 1.0 / std::sqrt(0.5 * std::log(w2));
  const double alpha = std::sqrt(2.0 / (w2 - 1.0));
  if (y == 0.0) y = 1.0;
  const double r = y / alpha;
  return delta * std::log(r + std::sqrt(r * r + 1.0));
}

inline double kurtosis_z(double b2, double n) {
  const double e = 3.0 * (n - 1.0) / (n + 1.0);
  const double var = 24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) * (n + 1.0) * (n + 3.0) * (n + 5.0));
  const double x = (b2 - e) / std::sqrt(var);
  const double sb1 = 6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0)) *
                     std::sqrt(6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0)));
  const double a = 6.0 + 8.0 / sb1 * (2.0 / sb1 + std::sqrt(1.0 + 4.0 / (sb1 * sb1)));
  const double term1 = 1.0 - 2.0 / (9.0 * a);
  const double denom = 1.0 + x * std::sqrt(2.0 / (a - 4.0));
  if (denom == 0.0) return std::nan("");
  const double term2 = std::copysign(std::cbrt((1.0 - 2.0 / a) / std::abs(denom)), denom);
  return (term1 - term2) / std::sqrt(2.0 / (9.0 * a));
}

struct NormalityResult {
  double z_skew;
  double z_kurt;
  double k2;
  double p_value;  ///< chi-squared(2) survival of k2
};

inline NormalityResult dagostino_pearson(const std::vector<double>& x) {
  if (x.size() < 20) throw DegenerateInputError("D'Agostino-Pearson test needs at least 20 values");
  const auto mo = sample_moments(x);
  const double n = static_cast<double>(x.size());
  const double zs = skewness_z(mo.skewness, n);
  const double zk = kurtosis_z(mo.kurtosis, n);
  const double k2 = zs * zs + zk * zk;
  return {zs, zk, k2, std::exp(-0.5 * k2)};
}

}  // namespace qes::analysis
