#pragma once

// Coupled Lang-Kobayashi rate equations, one Euler-Maruyama step.
//
//   dE1/dt = gamma1 (1 + i alpha1) N1 E1 + kappa e^{i psi} E2(t - tau_d) + sqrt(R1) xi1
//   dE2/dt = gamma2 (1 + i alpha2) N2 E2 + kappa e^{i psi} E1(t - tau_d)
//            + i [Omega + beta(t)] E2 + sqrt(R2) xi2
//   tau dN/dt = P(t) - N - (1 + 2N) |E|^2

#include <cmath>
#include <complex>
#include <string>

#include "qes/core/error.hpp"
#include "qes/sim/params.hpp"

namespace qes::sim {

using cplx = std::complex<double>;

struct LaserPairState {
  cplx e1{1e-3, 1e-3};
  cplx e2{1e-3, 1e-3};
  double n1 = 0.0;
  double n2 = 0.0;
  double t = 0.0;

  bool finite() const noexcept {
    return std::isfinite(e1.real()) && std::isfinite(e1.imag()) && std::isfinite(e2.real()) &&
           std::isfinite(e2.imag()) && std::isfinite(n1) && std::isfinite(n2);
  }

  friend bool operator==(const LaserPairState&, const LaserPairState&) = default;
};

/// Name of the first non-finite component, or empty.
inline std::string nonfinite_component(const LaserPairState& s) {
  if (!std::isfinite(s.e1.real())) return "Re E1";
  if (!std::isfinite(s.e1.imag())) return "Im E1";
  if (!std::isfinite(s.e2.real())) return "Re E2";
  if (!std::isfinite(s.e2.imag())) return "Im E2";
  if (!std::isfinite(s.n1)) return "N1";
  if (!std::isfinite(s.n2)) return "N2";
  return {};
}

/// Coefficients that stay fixed over a run.
struct StepConstants {
  double g1, ga1, g2, ga2;  // gamma, gamma*alpha per laser
  double inv_tau1, inv_tau2;
  double kr, ki;            // kappa e^{i psi}
  double sig1, sig2;        // sqrt(R dt) per laser
  double dt;

  static StepConstants make(const SimConfig& cfg, double dt) {
    const double k = cfg.coupling.kappa;
    return {cfg.laser1.gamma,
            cfg.laser1.gamma * cfg.laser1.alpha,
            cfg.laser2.gamma,
            cfg.laser2.gamma * cfg.laser2.alpha,
            1.0 / cfg.laser1.tau,
            1.0 / cfg.laser2.tau,
            k * std::cos(cfg.coupling.psi),
            k * std::sin(cfg.coupling.psi),
            std::sqrt(cfg.laser1.r_sp * dt),
            std::sqrt(cfg.laser2.r_sp * dt),
            dt};
  }
};

/// Step inputs that change every step.
struct StepDrive {
  double p1, p2;     ///< pumps
  double w2;         ///< Omega + beta(t) for laser 2
  cplx e1_src, e2_src;  ///< coupling sources: E1 and E2 at t - tau_d (or t when instantaneous)
  double g[4];       ///< standard normals: Re/Im laser 1, Re/Im laser 2
};

/// Raw-array form used by the hot loop; x = {Re E1, Im E1, Re E2, Im E2, N1, N2}.
[[gnu::always_inline]] inline void lk_step_raw(double* x, const StepConstants& c, double p1, double p2, double w2,
                                               double s1r, double s1i, double s2r, double s2i, const double* g) noexcept {
  const double e1r = x[0], e1i = x[1], e2r = x[2], e2i = x[3], n1 = x[4], n2 = x[5];
  const double a1 = c.g1 * n1, b1 = c.ga1 * n1;
  const double a2 = c.g2 * n2, b2 = c.ga2 * n2 + w2;
  // coupling: kappa e^{i psi} times the other laser's source field
  const double c1r = c.kr * s2r - c.ki * s2i, c1i = c.kr * s2i + c.ki * s2r;
  const double c2r = c.kr * s1r - c.ki * s1i, c2i = c.kr * s1i + c.ki * s1r;
  const double d1r = a1 * e1r - b1 * e1i + c1r;
  const double d1i = a1 * e1i + b1 * e1r + c1i;
  const double d2r = a2 * e2r - b2 * e2i + c2r;
  const double d2i = a2 * e2i + b2 * e2r + c2i;
  const double i1 = e1r * e1r + e1i * e1i, i2 = e2r * e2r + e2i * e2i;
  const double dn1 = (p1 - n1 - (1.0 + 2.0 * n1) * i1) * c.inv_tau1;
  const double dn2 = (p2 - n2 - (1.0 + 2.0 * n2) * i2) * c.inv_tau2;
  x[0] = e1r + c.dt * d1r + c.sig1 * g[0];
  x[1] = e1i + c.dt * d1i + c.sig1 * g[1];
  x[2] = e2r + c.dt * d2r + c.sig2 * g[2];
  x[3] = e2i + c.dt * d2i + c.sig2 * g[3];
  x[4] = n1 + c.dt * dn1;
  x[5] = n2 + c.dt * dn2;
}

/// One Euler-Maruyama step. Throws DivergenceError if the new state is not finite.
inline LaserPairState lk_step(const LaserPairState& s, const StepConstants& c, const StepDrive& d) {
  double x[6] = {s.e1.real(), s.e1.imag(), s.e2.real(), s.e2.imag(), s.n1, s.n2};
  lk_step_raw(x, c, d.p1, d.p2, d.w2, d.e1_src.real(), d.e1_src.imag(), d.e2_src.real(), d.e2_src.imag(), d.g);
  LaserPairState out{{x[0], x[1]}, {x[2], x[3]}, x[4], x[5], s.t + c.dt};
  if (!out.finite()) throw DivergenceError(nonfinite_component(out), out.t);
  return out;
}

/// Deterministic right-hand side; used by tests and the fixed-point checks.
struct Drift {
  cplx de1, de2;
  double dn1, dn2;
};

inline Drift lk_drift(const LaserPairState& s, const StepConstants& c, double p1, double p2, double w2, cplx e1_src,
                      cplx e2_src) noexcept {
  const double g0[4] = {0, 0, 0, 0};
  StepConstants unit = c;
  unit.dt = 1.0;
  unit.sig1 = unit.sig2 = 0.0;
  double x[6] = {s.e1.real(), s.e1.imag(), s.e2.real(), s.e2.imag(), s.n1, s.n2};
  lk_step_raw(x, unit, p1, p2, w2, e1_src.real(), e1_src.imag(), e2_src.real(), e2_src.imag(), g0);
  return {cplx{x[0], x[1]} - s.e1, cplx{x[2], x[3]} - s.e2, x[4] - s.n1, x[5] - s.n2};
}

}  // namespace qes::sim
