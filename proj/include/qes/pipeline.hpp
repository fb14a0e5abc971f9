#pragma once

// Simulate -> detect -> sample, in independent chunks of cycles.
//
// Chunk i is its own ensemble member: it starts from the nominal initial
// condition, integrates warm-up cycles, then `settle_cycles` that only prime
// the detection filters, then the cycles that are kept. Noise streams are keyed
// by (chunk, cycle), so the output depends on the chunk size but never on the
// number of workers or on scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "qes/analysis/phase_fit.hpp"
#include "qes/core/error.hpp"
#include "qes/core/rng.hpp"
#include "qes/detection/chain.hpp"
#include "qes/detection/sampler.hpp"
#include "qes/sim/simulate.hpp"

namespace qes {

struct PhaseWindow {
  bool enabled = true;
  double begin_ns = 6.0;  ///< from cycle start
  double end_ns = 11.0;

  friend bool operator==(const PhaseWindow&, const PhaseWindow&) = default;
};

struct PulseSpec {
  detection::ChainSpec chain{};
  detection::SamplingPolicy in_pulse{9.5, detection::Interpolation::linear};
  detection::SamplingPolicy off_pulse{0.3, detection::Interpolation::linear};
  PhaseWindow phase_window{};
  std::size_t chunk_cycles = 250;
  std::size_t settle_cycles = 1;
  double record_interval_ns = 0.01;  ///< optical trace resolution fed to the photodiode model

  friend bool operator==(const PulseSpec&, const PulseSpec&) = default;
};

/// Per-pulse outputs, in cycle order.
struct PulseSamples {
  std::vector<double> in_pulse;
  std::vector<double> off_pulse;
  std::vector<double> phases;
  std::vector<double> amplitudes;
  std::vector<std::uint8_t> low_confidence;
  std::vector<std::uint64_t> cycle;  ///< chunk * chunk_cycles + index within chunk

  std::size_t size() const noexcept { return in_pulse.size(); }

  void append(const PulseSamples& o) {
    auto cat = [](auto& a, const auto& b) { a.insert(a.end(), b.begin(), b.end()); };
    cat(in_pulse, o.in_pulse);
    cat(off_pulse, o.off_pulse);
    cat(phases, o.phases);
    cat(amplitudes, o.amplitudes);
    cat(low_confidence, o.low_confidence);
    cat(cycle, o.cycle);
  }
};

inline std::size_t default_workers() {
  const unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : h;
}

/// Run body(i) for i in [0, n) on up to `workers` threads; rethrows the first failure.
inline void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard lk(err_mu);
          if (!err) err = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

inline std::size_t record_stride_for(const sim::SimConfig& cfg, double record_interval_ns) {
  const double r = record_interval_ns / cfg.grid.dt;
  const auto s = static_cast<std::size_t>(std::llround(r));
  if (s < 1 || std::abs(r - static_cast<double>(s)) > 1e-6 * r)
    throw ConfigError("record interval must be an integer multiple of dt");
  return s;
}

/// Detected scope trace of one chunk plus the start time of every kept cycle.
struct ChunkTrace {
  detection::AnalogTrace scope;
  std::vector<double> cycle_starts;
};

inline ChunkTrace simulate_chunk_trace(sim::SimConfig cfg, const PulseSpec& ps, std::uint64_t chunk,
                                       std::size_t cycles) {
  cfg.grid.record_stride = record_stride_for(cfg, ps.record_interval_ns);
  sim::Integrator integ(cfg, chunk);
  integ.skip_cycles(cfg.grid.warmup_cycles);
  detection::AnalogTrace optical;
  optical.t0 = integ.cycle_start_time(integ.next_cycle());
  optical.dt = cfg.grid.dt * static_cast<double>(cfg.grid.record_stride);
  const std::size_t total = ps.settle_cycles + cycles;
  optical.values.reserve(total * (integ.steps_per_cycle() / cfg.grid.record_stride) + 1);
  ChunkTrace out;
  for (std::size_t c = 0; c < total; ++c) {
    if (c >= ps.settle_cycles) out.cycle_starts.push_back(integ.cycle_start_time(integ.next_cycle()));
    integ.run_cycles(1, [&](std::size_t, double, const double* x) {
      optical.values.push_back(
          detection::port_signal({x[0], x[1]}, {x[2], x[3]}, ps.chain.port));
    });
  }
  // one more record so the last cycle's tail is inside the trace
  const auto st = integ.state();
  optical.values.push_back(detection::port_signal(st.e1, st.e2, ps.chain.port));
  NormalStream amp(cfg.grid.seed, StreamDomain::amplifier, chunk, 0);
  out.scope = detection::detect(optical, ps.chain, amp);
  return out;
}

inline PulseSamples sample_chunk(const ChunkTrace& ct, const sim::SimConfig& cfg, const PulseSpec& ps,
                                 std::uint64_t first_cycle_id) {
  PulseSamples out;
  const double t_mod = cfg.t_mod();
  out.in_pulse = detection::sample_per_pulse(ct.scope, ct.cycle_starts, t_mod, ps.in_pulse);
  out.off_pulse = detection::sample_per_pulse(ct.scope, ct.cycle_starts, t_mod, ps.off_pulse);
  const std::size_t n = ct.cycle_starts.size();
  for (std::size_t i = 0; i < n; ++i) out.cycle.push_back(first_cycle_id + i);
  if (!ps.phase_window.enabled) return out;
  if (!(ps.phase_window.begin_ns >= 0.0 && ps.phase_window.end_ns <= t_mod &&
        ps.phase_window.begin_ns < ps.phase_window.end_ns))
    throw ConfigError("phase window must lie inside the cycle");
  const analysis::DetuningProfile theta{cfg.detuning.omega, cfg.detuning.beta0};
  const double dt = ct.scope.dt;
  for (std::size_t i = 0; i < n; ++i) {
    const double t0 = ct.cycle_starts[i] + ps.phase_window.begin_ns;
    const auto j0 = static_cast<std::size_t>(std::ceil((t0 - ct.scope.t0) / dt - 1e-9));
    const auto j1 = static_cast<std::size_t>(
        std::floor((ct.cycle_starts[i] + ps.phase_window.end_ns - ct.scope.t0) / dt + 1e-9));
    detection::AnalogTrace seg{ct.scope.time(j0), dt,
                               std::vector<double>(ct.scope.values.begin() + static_cast<std::ptrdiff_t>(j0),
                                                   ct.scope.values.begin() + static_cast<std::ptrdiff_t>(
                                                                                 std::min(j1 + 1, ct.scope.size())))};
    const double t_ref0 = cfg.detuning.chirp_reset == sim::ChirpReset::per_cycle ? seg.t0 - ct.cycle_starts[i] : seg.t0;
    const auto fit = analysis::extract_pulse_phase(seg, t_ref0, theta);
    out.phases.push_back(fit.phase);
    out.amplitudes.push_back(fit.amplitude);
    out.low_confidence.push_back(fit.low_confidence ? 1 : 0);
  }
  return out;
}

/// n_pulses kept cycles, split into chunks of ps.chunk_cycles.
inline PulseSamples run_pulses(const sim::SimConfig& cfg, const PulseSpec& ps, std::size_t n_pulses,
                               std::size_t workers = default_workers()) {
  if (ps.chunk_cycles == 0) throw ConfigError("chunk_cycles must be >= 1");
  cfg.validate();
  record_stride_for(cfg, ps.record_interval_ns);
  const std::size_t chunks = (n_pulses + ps.chunk_cycles - 1) / ps.chunk_cycles;
  std::vector<PulseSamples> parts(chunks);
  parallel_for(chunks, workers, [&](std::size_t i) {
    const std::size_t cycles = std::min(ps.chunk_cycles, n_pulses - i * ps.chunk_cycles);
    const auto ct = simulate_chunk_trace(cfg, ps, i, cycles);
    parts[i] = sample_chunk(ct, cfg, ps, static_cast<std::uint64_t>(i) * ps.chunk_cycles);
  });
  PulseSamples all;
  for (const auto& p : parts) all.append(p);
  return all;
}

}  // namespace qes
