#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "qes/core/error.hpp"

namespace qes::sim {

/// History of both fields on the integration grid, read back at t - tau_d with
/// linear interpolation between the two bracketing steps.
class DelayLine {
 public:
  DelayLine() = default;

  DelayLine(double tau_d, double dt) {
    if (!(dt > 0.0)) throw ConfigError("delay line needs dt > 0");
    if (!(tau_d >= 0.0)) throw ConfigError("delay line needs tau_d >= 0");
    const double q = tau_d / dt;
    // Snap to the grid when tau_d is a multiple of dt up to rounding.
    const double qr = std::round(q);
    const double qq = std::abs(q - qr) < 1e-9 * (1.0 + q) ? qr : q;
    whole_ = static_cast<std::size_t>(std::floor(qq));
    frac_ = qq - static_cast<double>(whole_);
    depth_ = static_cast<std::size_t>(std::ceil(qq)) + 2;
    buf_.assign(4 * depth_, 0.0);
  }

  std::size_t depth() const noexcept { return depth_; }
  std::size_t whole_steps() const noexcept { return whole_; }
  double fraction() const noexcept { return frac_; }

  /// Fill the whole history with one state.
  void fill(double e1r, double e1i, double e2r, double e2i) noexcept {
    for (std::size_t k = 0; k < depth_; ++k) {
      double* p = buf_.data() + 4 * k;
      p[0] = e1r;
      p[1] = e1i;
      p[2] = e2r;
      p[3] = e2i;
    }
    head_ = 0;
  }

  /// Append the state at the current step.
  void push(const double* x) noexcept {
    head_ = head_ + 1 == depth_ ? 0 : head_ + 1;
    double* p = buf_.data() + 4 * head_;
    p[0] = x[0];
    p[1] = x[1];
    p[2] = x[2];
    p[3] = x[3];
  }

  /// Fields tau_d before the most recently pushed step: out = {Re E1, Im E1, Re E2, Im E2}.
  void read(double* out) const noexcept {
    std::size_t i0 = head_ >= whole_ ? head_ - whole_ : head_ + depth_ - whole_;
    std::size_t i1 = i0 == 0 ? depth_ - 1 : i0 - 1;
    const double* a = buf_.data() + 4 * i0;
    const double* b = buf_.data() + 4 * i1;
    const double w = frac_;
    for (int j = 0; j < 4; ++j) out[j] = a[j] + w * (b[j] - a[j]);
  }

 private:
  std::vector<double> buf_;
  std::size_t depth_ = 0;
  std::size_t whole_ = 0;
  double frac_ = 0.0;
  std::size_t head_ = 0;
};

}  // namespace qes::sim
