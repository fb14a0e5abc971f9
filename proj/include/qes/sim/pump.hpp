#pragma once

#include <cmath>
#include <vector>

#include "qes/sim/params.hpp"

namespace qes::sim {

/// Pump at time t measured from the pulse centre (cycle window [-t_mod/2, t_mod/2]).
inline double pump_value(double t_in_cycle, const PumpSpec& spec) noexcept {
  if (spec.mode == PumpMode::cw) return spec.p_bar;
  const double x = t_in_cycle / spec.delta_tau;
  const double shape = std::exp(-std::pow(x * x, spec.m));
  return spec.p_bar * (-0.5 + 1.5 * shape);
}

/// Pump at time t measured from the start of the cycle; the pulse sits at t_mod/2.
inline double pump_from_cycle_start(double t_from_start, const PumpSpec& spec) noexcept {
  return pump_value(t_from_start - 0.5 * spec.t_mod, spec);
}

/// One modulation period of pump samples on the integration grid.
inline std::vector<double> pump_table(const PumpSpec& spec, double dt, std::size_t steps) {
  std::vector<double> out(steps);
  for (std::size_t k = 0; k < steps; ++k) out[k] = pump_from_cycle_start(static_cast<double>(k) * dt, spec);
  return out;
}

/// Angular detuning of laser 2: omega + beta0 * t_ref. With per-cycle reset, t_ref
/// restarts at every multiple of t_mod.
inline double chirp_detuning(double t, const DetuningSpec& spec, double t_mod) noexcept {
  double t_ref = t;
  if (spec.chirp_reset == ChirpReset::per_cycle && t_mod > 0.0) {
    t_ref = t - std::floor(t / t_mod) * t_mod;
    if (t_ref < 0.0) t_ref = 0.0;
  }
  return spec.omega + spec.beta0 * t_ref;
}

struct CouplingValidity {
  bool valid;
  double lhs;  ///< tau_d * kappa
  double rhs;  ///< 1 / sqrt(1 + alpha^2)
};

inline CouplingValidity validate_instantaneous_coupling(const CouplingSpec& c, double alpha) noexcept {
  const double lhs = c.tau_d * c.kappa;
  const double rhs = 1.0 / std::sqrt(1.0 + alpha * alpha);
  return {lhs < rhs, lhs, rhs};
}

/// Half-width of the locking range in angular detuning, rad/ns.
inline double adler_lock_range(double kappa) {
  if (!(kappa >= 0.0)) throw ConfigError("kappa must be >= 0");
  return 2.0 * kappa;
}

/// Normalized pump from the current ratio J/J_th and the product G_N * N_0.
inline double pump_from_current_ratio(double x, double gn_n0) {
  if (!(x >= 0.0)) throw ConfigError("current ratio must be >= 0");
  return gn_n0 * (x - 1.0) / 2.0;
}

}  // namespace qes::sim
