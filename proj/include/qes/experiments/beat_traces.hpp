#pragma once

// Chirped beat notes of the gain-switched laser against the CW laser for a few
// initial detunings, and the near-zero-detuning (NZD) time of each.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "qes/config.hpp"
#include "qes/detection/beat_frequency.hpp"
#include "qes/detection/chain.hpp"
#include "qes/experiments/output.hpp"
#include "qes/pipeline.hpp"
#include "qes/sim/simulate.hpp"

namespace qes::experiments {

/// |f| = |a + b t| fitted to a frequency track by choosing the sign flip that
/// minimises the squared error of a single line through the signed points.
struct VFit {
  double t_zero = std::numeric_limits<double>::quiet_NaN();  ///< -a / b
  double slope = 0.0;                                         ///< b, GHz/ns
  double rms = 0.0;
  bool ok = false;
};

inline VFit fit_v(const std::vector<detection::FrequencyPoint>& pts) {
  VFit best;
  const std::size_t n = pts.size();
  if (n < 4) return best;
  double best_sse = std::numeric_limits<double>::infinity();
  for (std::size_t s = 1; s < n; ++s) {
    double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = pts[k].t_ns, y = k < s ? -pts[k].f_ghz : pts[k].f_ghz;
      st += t;
      sy += y;
      stt += t * t;
      sty += t * y;
      syy += y * y;
    }
    const double nn = static_cast<double>(n);
    const double den = nn * stt - st * st;
    if (den <= 0.0) continue;
    const double b = (nn * sty - st * sy) / den;
    const double a = (sy - b * st) / nn;
    const double sse = syy - a * sy - b * sty;
    if (sse < best_sse && b != 0.0) {
      best_sse = sse;
      best = {-a / b, b, std::sqrt(std::max(0.0, sse) / nn), true};
    }
  }
  return best;
}

struct BeatTrace {
  double omega = 0.0;
  double beta0 = 0.0;
  detection::AnalogTrace detected;  ///< configured port, time from cycle start
  detection::AnalogTrace balanced;  ///< used for the frequency track
  std::vector<detection::FrequencyPoint> track;
  VFit vfit;
  double t_star_ns = std::numeric_limits<double>::quiet_NaN();
  double expected_t_star_ns = std::numeric_limits<double>::quiet_NaN();  ///< |Omega| / beta0
  double mean_f_ghz = 0.0;
  double min_f_ghz = 0.0;
  double t_min_f_ns = 0.0;
};

inline BeatTrace beat_trace(const ExperimentConfig& cfg, double omega, std::size_t index) {
  const auto& bt = cfg.beat_traces;
  sim::SimConfig c = cfg.sim;
  c.detuning.omega = omega;
  c.detuning.beta0 = bt.beta0;
  c.grid.n_cycles = 1;
  c.grid.record_stride = record_stride_for(c, cfg.pulse.record_interval_ns);
  const auto tr = sim::simulate(c, index);
  BeatTrace out;
  out.omega = omega;
  out.beta0 = bt.beta0;
  NormalStream amp_a(c.grid.seed, StreamDomain::amplifier, index, 0);
  NormalStream amp_b(c.grid.seed, StreamDomain::amplifier, index, 1);
  auto shift = [&](detection::AnalogTrace t) {
    t.t0 -= tr.t0;
    return t;
  };
  out.detected = shift(detection::detect(detection::port_trace(tr, cfg.pulse.chain.port), cfg.pulse.chain, amp_a));
  detection::ChainSpec bal = cfg.pulse.chain;
  bal.port = detection::Port::balanced;
  out.balanced = shift(detection::detect(detection::port_trace(tr, bal.port), bal, amp_b));
  double peak = 0.0;
  for (std::size_t j = 0; j < out.balanced.size(); ++j) {
    const double t = out.balanced.time(j);
    if (t >= bt.track_begin_ns && t <= bt.track_end_ns) peak = std::max(peak, std::abs(out.balanced.values[j]));
  }
  for (const auto& p : detection::instantaneous_beat_frequency(out.balanced, bt.hysteresis * peak))
    if (p.t_ns >= bt.track_begin_ns && p.t_ns <= bt.track_end_ns) out.track.push_back(p);
  if (out.track.empty()) return out;
  double sum = 0.0;
  out.min_f_ghz = out.track[0].f_ghz;
  out.t_min_f_ns = out.track[0].t_ns;
  for (const auto& p : out.track) {
    sum += p.f_ghz;
    if (p.f_ghz < out.min_f_ghz) {
      out.min_f_ghz = p.f_ghz;
      out.t_min_f_ns = p.t_ns;
    }
  }
  out.mean_f_ghz = sum / static_cast<double>(out.track.size());
  if (bt.beta0 > 0.0) {
    out.vfit = fit_v(out.track);
    out.t_star_ns = out.vfit.t_zero;
    out.expected_t_star_ns = std::abs(omega) / bt.beta0;
  }
  return out;
}

inline std::vector<BeatTrace> run_beat_traces(const ExperimentConfig& cfg, std::size_t workers = default_workers()) {
  cfg.validate();
  if (cfg.sim.pump2.mode != sim::PumpMode::gain_switched) throw ConfigError("beat-traces needs pump2 gain-switched");
  const auto& om = cfg.beat_traces.omegas;
  std::vector<BeatTrace> out(om.size());
  parallel_for(om.size(), workers, [&](std::size_t i) { out[i] = beat_trace(cfg, om[i], i); });
  return out;
}

/// True when t* strictly increases with |Omega|.
inline bool nzd_monotone(const std::vector<BeatTrace>& traces) {
  std::vector<const BeatTrace*> v;
  for (const auto& t : traces) v.push_back(&t);
  std::sort(v.begin(), v.end(), [](auto* a, auto* b) { return std::abs(a->omega) < std::abs(b->omega); });
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i]->t_star_ns > v[i - 1]->t_star_ns)) return false;
  return true;
}

inline void write_beat_traces(const fs::path& dir, const std::vector<BeatTrace>& traces, bool plot) {
  auto sm = open_out(dir / "nzd_summary.csv");
  sm << "index,omega_rad_per_ns,beta0_rad_per_ns2,t_star_ns,expected_t_star_ns,slope_ghz_per_ns,fit_rms_ghz,"
        "mean_f_ghz,min_f_ghz,t_min_f_ns,track_points\n";
  std::string gp = "set datafile separator ','\nset key autotitle columnhead\nset xlabel 't (ns)'\n";
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& b = traces[i];
    sm << i << ',' << num(b.omega) << ',' << num(b.beta0) << ',' << num(b.t_star_ns) << ','
       << num(b.expected_t_star_ns) << ',' << num(b.vfit.slope) << ',' << num(b.vfit.rms) << ',' << num(b.mean_f_ghz)
       << ',' << num(b.min_f_ghz) << ',' << num(b.t_min_f_ns) << ',' << b.track.size() << '\n';
    const std::string tag = std::to_string(i);
    auto tr = open_out(dir / ("trace_" + tag + ".csv"));
    tr << "t_ns,detected,balanced\n";
    for (std::size_t j = 0; j < b.detected.size(); ++j)
      tr << num(b.detected.time(j)) << ',' << num(b.detected.values[j]) << ','
         << num(j < b.balanced.size() ? b.balanced.values[j] : 0.0) << '\n';
    auto fr = open_out(dir / ("frequency_" + tag + ".csv"));
    fr << "t_ns,f_ghz\n";
    for (const auto& p : b.track) fr << num(p.t_ns) << ',' << num(p.f_ghz) << '\n';
    gp += (i == 0 ? "plot " : ", ") + std::string("'frequency_") + tag + ".csv' using 1:2 with lines title 'Omega=" +
          num(b.omega) + "'";
  }
  if (plot) write_text(dir / "beat_traces.gp", gp + "\n");
}

}  // namespace qes::experiments
