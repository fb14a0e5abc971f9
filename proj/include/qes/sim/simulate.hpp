#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "qes/core/error.hpp"
#include "qes/core/rng.hpp"
#include "qes/sim/delay_line.hpp"
#include "qes/sim/lk.hpp"
#include "qes/sim/params.hpp"
#include "qes/sim/pump.hpp"

namespace qes::sim {

/// Decimated record of a run. Sample j sits at t0 + j * dt_record.
struct Trajectory {
  double t0 = 0.0;
  double dt_record = 0.0;
  double t_mod = 0.0;
  std::size_t records_per_cycle = 0;
  std::size_t first_cycle = 0;              ///< absolute index of the first recorded cycle
  std::vector<cplx> e1, e2;
  std::vector<double> n1, n2;
  std::vector<std::size_t> cycle_starts;    ///< record index of each cycle start

  std::size_t size() const noexcept { return n1.size(); }
  double time(std::size_t j) const noexcept { return t0 + static_cast<double>(j) * dt_record; }

  void reserve(std::size_t n) {
    e1.reserve(n);
    e2.reserve(n);
    n1.reserve(n);
    n2.reserve(n);
  }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Sequential integrator for one ensemble member. Cycle c draws its Langevin
/// noise from streams (laser_noise, ensemble, 2c + laser), so a cycle's noise
/// does not depend on which worker runs it or how long earlier cycles were.
class Integrator {
 public:
  explicit Integrator(const SimConfig& cfg, std::uint64_t ensemble = 0)
      : cfg_(cfg), ensemble_(ensemble) {
    cfg_.validate();
    steps_ = cfg_.steps_per_cycle();
    sub_ = cfg_.grid.noise_refinement;
    consts_ = StepConstants::make(cfg_, cfg_.grid.dt);
    // The refinement sums `sub_` unit normals per quadrature; rescale to unit variance.
    const double norm = 1.0 / std::sqrt(static_cast<double>(sub_));
    consts_.sig1 *= norm;
    consts_.sig2 *= norm;
    pump1_ = pump_table(cfg_.pump1, cfg_.grid.dt, steps_);
    pump2_ = pump_table(cfg_.pump2, cfg_.grid.dt, steps_);
    delayed_ = cfg_.coupling.mode == CouplingMode::delayed;
    if (delayed_) delay_ = DelayLine(cfg_.coupling.tau_d, cfg_.grid.dt);
    set_state(LaserPairState{});
  }

  const SimConfig& config() const noexcept { return cfg_; }
  std::size_t steps_per_cycle() const noexcept { return steps_; }
  std::size_t next_cycle() const noexcept { return cycle_; }

  LaserPairState state() const noexcept {
    return {{x_[0], x_[1]}, {x_[2], x_[3]}, x_[4], x_[5], cycle_start_time(cycle_)};
  }

  /// Reset the state and the delay history. Only valid between cycles.
  void set_state(const LaserPairState& s) {
    x_[0] = s.e1.real();
    x_[1] = s.e1.imag();
    x_[2] = s.e2.real();
    x_[3] = s.e2.imag();
    x_[4] = s.n1;
    x_[5] = s.n2;
    if (delayed_) delay_.fill(x_[0], x_[1], x_[2], x_[3]);
  }

  double cycle_start_time(std::size_t c) const noexcept { return static_cast<double>(c) * cfg_.t_mod(); }

  /// Integrate `count` cycles. `obs(record_in_cycle, t, x)` sees the state
  /// {Re E1, Im E1, Re E2, Im E2, N1, N2} before every record_stride-th step.
  template <class Observer>
  void run_cycles(std::size_t count, Observer&& obs) {
    for (std::size_t i = 0; i < count; ++i) run_one(obs);
  }

  void skip_cycles(std::size_t count) {
    run_cycles(count, [](std::size_t, double, const double*) {});
  }

 private:
  template <class Observer>
  void run_one(Observer& obs) {
    const std::size_t c = cycle_;
    const double t_start = cycle_start_time(c);
    const double dt = cfg_.grid.dt;
    const std::size_t stride = cfg_.grid.record_stride;
    const bool noisy = consts_.sig1 != 0.0 || consts_.sig2 != 0.0;
    if (noisy) {
      noise1_.reseed(cfg_.grid.seed, StreamDomain::laser_noise, ensemble_, 2 * c);
      noise2_.reseed(cfg_.grid.seed, StreamDomain::laser_noise, ensemble_, 2 * c + 1);
    }
    const double omega = cfg_.detuning.omega;
    const double beta0 = cfg_.detuning.beta0;
    const bool reset = cfg_.detuning.chirp_reset == ChirpReset::per_cycle;
    const std::size_t sub2 = 2 * sub_;
    double x[6];
    for (int j = 0; j < 6; ++j) x[j] = x_[j];
    double g[4] = {0.0, 0.0, 0.0, 0.0};
    double src[4];
    std::size_t rec = 0;
    for (std::size_t k = 0; k < steps_; ++k) {
      const double t_local = static_cast<double>(k) * dt;
      if (k % stride == 0) obs(rec++, t_start + t_local, static_cast<const double*>(x));
      if (delayed_) {
        delay_.read(src);
      } else {
        src[0] = x[0];
        src[1] = x[1];
        src[2] = x[2];
        src[3] = x[3];
      }
      const double w2 = omega + beta0 * (reset ? t_local : t_start + t_local);
      if (noisy) {
        const double* a = noise1_.take(sub2);
        const double* b = noise2_.take(sub2);
        g[0] = a[0];
        g[1] = a[1];
        g[2] = b[0];
        g[3] = b[1];
        for (std::size_t s = 2; s < sub2; s += 2) {
          g[0] += a[s];
          g[1] += a[s + 1];
          g[2] += b[s];
          g[3] += b[s + 1];
        }
      }
      lk_step_raw(x, consts_, pump1_[k], pump2_[k], w2, src[0], src[1], src[2], src[3], g);
      if (delayed_) delay_.push(x);
      if (!std::isfinite(x[0] + x[1] + x[2] + x[3] + x[4] + x[5])) {
        const LaserPairState bad{{x[0], x[1]}, {x[2], x[3]}, x[4], x[5], t_start + t_local + dt};
        throw DivergenceError(nonfinite_component(bad), bad.t);
      }
    }
    for (int j = 0; j < 6; ++j) x_[j] = x[j];
    ++cycle_;
  }

  SimConfig cfg_;
  std::uint64_t ensemble_;
  std::size_t steps_ = 0;
  std::size_t sub_ = 1;
  StepConstants consts_{};
  std::vector<double> pump1_, pump2_;
  bool delayed_ = false;
  DelayLine delay_;
  NormalStream noise1_, noise2_;
  double x_[6] = {};
  std::size_t cycle_ = 0;
};

/// Integrate warm-up plus n_cycles and return the decimated record of the latter.
inline Trajectory simulate(const SimConfig& cfg, std::uint64_t ensemble = 0) {
  Integrator integ(cfg, ensemble);
  integ.skip_cycles(cfg.grid.warmup_cycles);
  Trajectory tr;
  tr.t0 = integ.cycle_start_time(integ.next_cycle());
  tr.dt_record = cfg.grid.dt * static_cast<double>(cfg.grid.record_stride);
  tr.t_mod = cfg.t_mod();
  tr.records_per_cycle = integ.steps_per_cycle() / cfg.grid.record_stride;
  tr.first_cycle = integ.next_cycle();
  tr.reserve(cfg.grid.n_cycles * tr.records_per_cycle);
  for (std::size_t c = 0; c < cfg.grid.n_cycles; ++c) {
    tr.cycle_starts.push_back(tr.size());
    integ.run_cycles(1, [&](std::size_t, double, const double* x) {
      tr.e1.emplace_back(x[0], x[1]);
      tr.e2.emplace_back(x[2], x[3]);
      tr.n1.push_back(x[4]);
      tr.n2.push_back(x[5]);
    });
  }
  return tr;
}

}  // namespace qes::sim
