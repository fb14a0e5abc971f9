#pragma once

// Physical and numerical parameters of the two-laser source.
//
// Units throughout: time in ns, rates in 1/ns, angular frequency in rad/ns,
// chirp in rad/ns^2. Fields and inversions are dimensionless.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>

#include "qes/core/error.hpp"

namespace qes::sim {

struct LaserParams {
  double alpha = 2.0;    ///< linewidth enhancement factor
  double gamma = 150.0;  ///< photon decay rate, 1/ns
  double tau = 1.0;      ///< carrier lifetime, ns
  double r_sp = 0.2;     ///< spontaneous emission variance rate, 1/ns (2e-4 1/ps)

  void validate(const std::string& who = "laser") const {
    if (!std::isfinite(alpha)) throw ConfigError(who + ".alpha must be finite");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError(who + ".gamma must be > 0");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError(who + ".tau must be > 0");
    if (!(r_sp >= 0.0) || !std::isfinite(r_sp)) throw ConfigError(who + ".r_sp must be >= 0");
  }

  friend bool operator==(const LaserParams&, const LaserParams&) = default;
};

enum class CouplingMode { instantaneous, delayed };

struct CouplingSpec {
  double kappa = 0.0;   ///< coupling rate, 1/ns
  double psi = 0.0;     ///< feedback phase, rad, kept in [0, 2pi)
  double tau_d = 0.02;  ///< feedback delay, ns
  CouplingMode mode = CouplingMode::delayed;

  void validate() const {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ConfigError("coupling.kappa must be >= 0");
    if (!(tau_d >= 0.0) || !std::isfinite(tau_d)) throw ConfigError("coupling.tau_d must be >= 0");
    if (!std::isfinite(psi)) throw ConfigError("coupling.psi must be finite");
  }

  friend bool operator==(const CouplingSpec&, const CouplingSpec&) = default;
};

/// Fold a phase into [0, 2pi).
inline double fold_phase(double psi) noexcept {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::fmod(psi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

inline CouplingSpec make_coupling(double kappa, double psi, double tau_d, CouplingMode mode) {
  CouplingSpec c{kappa, fold_phase(psi), tau_d, mode};
  c.validate();
  return c;
}

enum class ChirpReset { per_cycle, never };

struct DetuningSpec {
  double omega = 0.0;  ///< initial angular detuning of laser 2 w.r.t. laser 1, rad/ns
  double beta0 = 2.0 * std::numbers::pi * 1e-3;  ///< angular chirp rate, rad/ns^2 (2pi x 1 MHz/ns)
  ChirpReset chirp_reset = ChirpReset::per_cycle;

  void validate() const {
    if (!std::isfinite(omega)) throw ConfigError("detuning.omega must be finite");
    if (!(beta0 >= 0.0) || !std::isfinite(beta0)) throw ConfigError("detuning.beta0 must be >= 0");
  }

  friend bool operator==(const DetuningSpec&, const DetuningSpec&) = default;
};

enum class PumpMode { cw, gain_switched };

struct PumpSpec {
  PumpMode mode = PumpMode::cw;
  double p_bar = 8.0;      ///< peak normalized pump
  double delta_tau = 5.0;  ///< current pulse duration, ns
  int m = 5;               ///< super-Gaussian order
  double t_mod = 12.0;     ///< modulation period, ns

  void validate(const std::string& who = "pump") const {
    if (!std::isfinite(p_bar)) throw ConfigError(who + ".p_bar must be finite");
    if (m < 1) throw ConfigError(who + ".m must be >= 1");
    if (!(t_mod > 0.0) || !std::isfinite(t_mod)) throw ConfigError(who + ".t_mod must be > 0");
    if (mode == PumpMode::gain_switched) {
      if (!(delta_tau > 0.0)) throw ConfigError(who + ".delta_tau must be > 0");
      if (!(delta_tau < t_mod)) throw ConfigError(who + ".delta_tau must be < t_mod");
    }
  }

  friend bool operator==(const PumpSpec&, const PumpSpec&) = default;
};

struct SimGrid {
  double dt = 1e-4;                  ///< integration step, ns
  std::size_t n_cycles = 1;          ///< recorded modulation cycles
  std::size_t warmup_cycles = 5;     ///< integrated but not recorded
  std::size_t record_stride = 100;   ///< steps between recorded samples
  std::uint64_t seed = 1;            ///< master seed
  std::size_t noise_refinement = 1;  ///< Brownian sub-increments summed per step

  friend bool operator==(const SimGrid&, const SimGrid&) = default;
};

enum class Scheme { euler_maruyama };

/// Everything one trajectory needs. Laser 1 is the CW local oscillator;
/// laser 2 carries the detuning, the chirp, and (usually) the gain switching.
struct SimConfig {
  LaserParams laser1;
  LaserParams laser2;
  CouplingSpec coupling{};
  DetuningSpec detuning{};
  PumpSpec pump1{PumpMode::cw, 8.0, 5.0, 5, 12.0};
  PumpSpec pump2{PumpMode::gain_switched, 8.0, 5.0, 5, 12.0};
  SimGrid grid{};

  /// Cycle clock; taken from laser 2's pump.
  double t_mod() const noexcept { return pump2.t_mod; }

  std::size_t steps_per_cycle() const noexcept {
    return static_cast<std::size_t>(std::llround(t_mod() / grid.dt));
  }

  void validate() const {
    laser1.validate("laser1");
    laser2.validate("laser2");
    coupling.validate();
    detuning.validate();
    pump1.validate("pump1");
    pump2.validate("pump2");
    if (!(grid.dt > 0.0) || !std::isfinite(grid.dt)) throw ConfigError("grid.dt must be > 0");
    if (grid.record_stride < 1) throw ConfigError("grid.record_stride must be >= 1");
    if (grid.noise_refinement < 1) throw ConfigError("grid.noise_refinement must be >= 1");
    if (coupling.mode == CouplingMode::delayed && coupling.kappa > 0.0 && !(grid.dt < coupling.tau_d))
      throw ConfigError("grid.dt must be < coupling.tau_d in delayed mode");
    const double ratio = t_mod() / grid.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-6 * ratio)
      throw ConfigError("t_mod must be an integer multiple of dt");
    if (steps_per_cycle() % grid.record_stride != 0)
      throw ConfigError("steps per cycle must be a multiple of grid.record_stride");
  }

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Nominal device: two identical lasers, laser 2 gain-switched.
inline SimConfig nominal_config() { return SimConfig{}; }

/// Coupling rate of the high-loss chip: 5 1/ns reduced by 30 dB.
inline constexpr double kKappaLowLoss = 5.0;
inline constexpr double kKappaHighLoss = 5e-3;

}  // namespace qes::sim
