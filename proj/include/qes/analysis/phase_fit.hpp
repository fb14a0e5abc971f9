#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "qes/analysis/circular.hpp"
#include "qes/core/error.hpp"
#include "qes/detection/trace.hpp"

namespace qes::analysis {

/// Accumulated beat phase theta(t_ref) = omega t_ref + beta0 t_ref^2 / 2, t_ref from cycle start.
struct DetuningProfile {
  double omega = 0.0;
  double beta0 = 0.0;
  double operator()(double t_ref) const noexcept { return omega * t_ref + 0.5 * beta0 * t_ref * t_ref; }
};

struct PhaseFit {
  double phase;      ///< phi in [-pi, pi)
  double amplitude;  ///< A >= 0
  double offset;     ///< C
  double residual_rms;
  bool low_confidence;
};

/// Least-squares fit of A cos(theta(t) + phi) + C over the segment, written as
/// the linear model a cos(theta) + b sin(theta) + C. `t_ref0` is the segment's
/// first sample time measured from the cycle start.
inline PhaseFit extract_pulse_phase(const detection::AnalogTrace& seg, double t_ref0, const DetuningProfile& theta,
                                    double min_snr = 1.0) {
  const std::size_t n = seg.size();
  if (n < 4) throw DegenerateInputError("phase fit needs at least four samples");
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d aty = Eigen::Vector3d::Zero();
  std::vector<double> c(n), s(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double th = theta(t_ref0 + static_cast<double>(j) * seg.dt);
    c[j] = std::cos(th);
    s[j] = std::sin(th);
    const Eigen::Vector3d row(c[j], s[j], 1.0);
    ata.noalias() += row * row.transpose();
    aty += row * seg.values[j];
  }
  const Eigen::Vector3d x = ata.ldlt().solve(aty);
  double ss = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double r = seg.values[j] - (x[0] * c[j] + x[1] * s[j] + x[2]);
    ss += r * r;
  }
  const double rms = std::sqrt(ss / static_cast<double>(n));
  const double amp = std::hypot(x[0], x[1]);
  // a cos + b sin = A cos(theta + phi) with a = A cos phi, b = -A sin phi
  const double phi = wrap_phase(std::atan2(-x[1], x[0]));
  return {phi, amp, x[2], rms, !(amp > min_snr * rms) || !std::isfinite(phi)};
}

}  // namespace qes::analysis
