#pragma once

// Sweep the initial detuning of two CW lasers and classify each point as
// frequency-locked or beating.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "qes/analysis/locking.hpp"
#include "qes/config.hpp"
#include "qes/experiments/output.hpp"
#include "qes/pipeline.hpp"
#include "qes/sim/pump.hpp"
#include "qes/sim/simulate.hpp"

namespace qes::experiments {

struct LockingPoint {
  double omega = 0.0;  ///< rad/ns
  bool locked = false;
  double beat_ghz = 0.0;  ///< signed mean beat (phase winding rate); 0 when locked
  double peak_ghz = 0.0;  ///< strongest spectral line; 0 when locked
  double peak_to_floor = 0.0;
  double slips = 0.0;
};

struct LockingMap {
  std::vector<LockingPoint> points;
  double kappa = 0.0;
  double adler_width = 0.0;  ///< 2 * (2 kappa)
  double window_lo = 0.0, window_hi = 0.0;
  double window_width = 0.0;  ///< locked points in the run containing Omega = 0, times the grid spacing
  std::size_t locked_total = 0;
  bool contiguous = false;  ///< every locked point belongs to that run
};

inline std::vector<double> omega_grid(const LockingMapSettings& s) {
  std::vector<double> g(s.points);
  const double step = (s.omega_max - s.omega_min) / static_cast<double>(s.points - 1);
  for (std::size_t i = 0; i < s.points; ++i) g[i] = s.omega_min + step * static_cast<double>(i);
  return g;
}

inline LockingPoint locking_point(const ExperimentConfig& cfg, double omega, std::size_t index) {
  sim::SimConfig c = cfg.sim;
  c.detuning.omega = omega;
  c.grid.n_cycles = cfg.locking_map.cycles;
  c.grid.record_stride = record_stride_for(c, cfg.locking_map.record_interval_ns);
  const auto tr = sim::simulate(c, index);
  std::vector<std::complex<double>> beat(tr.size());
  for (std::size_t j = 0; j < tr.size(); ++j) beat[j] = tr.e2[j] * std::conj(tr.e1[j]);
  const auto r = analysis::lock_classify_beat(beat, tr.dt_record, cfg.locking);
  return {omega, r.locked, r.mean_beat_ghz, r.beat_ghz, r.metric, r.slips};
}

inline LockingMap run_locking_map(const ExperimentConfig& cfg, std::size_t workers = default_workers()) {
  cfg.validate();
  if (cfg.sim.pump1.mode != sim::PumpMode::cw || cfg.sim.pump2.mode != sim::PumpMode::cw)
    throw ConfigError("locking-map needs both pumps in cw mode");
  const auto grid = omega_grid(cfg.locking_map);
  LockingMap m;
  m.points.resize(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) { m.points[i] = locking_point(cfg, grid[i], i); });
  m.kappa = cfg.sim.coupling.kappa;
  m.adler_width = 2.0 * sim::adler_lock_range(m.kappa);
  std::size_t zero = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i]) < std::abs(grid[zero])) zero = i;
    if (m.points[i].locked) ++m.locked_total;
  }
  if (m.points[zero].locked) {
    std::size_t lo = zero, hi = zero;
    while (lo > 0 && m.points[lo - 1].locked) --lo;
    while (hi + 1 < grid.size() && m.points[hi + 1].locked) ++hi;
    const double step = grid[1] - grid[0];
    m.window_lo = grid[lo];
    m.window_hi = grid[hi];
    m.window_width = static_cast<double>(hi - lo + 1) * step;
    m.contiguous = m.locked_total == hi - lo + 1;
  }
  return m;
}

inline void write_locking_map(const fs::path& dir, const LockingMap& m, bool plot) {
  auto os = open_out(dir / "locking_map.csv");
  os << "omega_rad_per_ns,locked,beat_ghz,peak_ghz,peak_to_floor,slips\n";
  for (const auto& p : m.points)
    os << num(p.omega) << ',' << (p.locked ? 1 : 0) << ',' << num(p.beat_ghz) << ',' << num(p.peak_ghz) << ','
       << num(p.peak_to_floor) << ',' << num(p.slips) << '\n';
  auto sm = open_out(dir / "locking_summary.csv");
  sm << "kappa_per_ns,adler_width_rad_per_ns,window_lo_rad_per_ns,window_hi_rad_per_ns,window_width_rad_per_ns,"
        "locked_points,contiguous\n";
  sm << num(m.kappa) << ',' << num(m.adler_width) << ',' << num(m.window_lo) << ',' << num(m.window_hi) << ','
     << num(m.window_width) << ',' << m.locked_total << ',' << (m.contiguous ? 1 : 0) << '\n';
  if (plot)
    write_text(dir / "locking_map.gp",
               "set datafile separator ','\nset key autotitle columnhead\n"
               "set xlabel 'Omega (rad/ns)'\nset ylabel 'beat (GHz)'\n"
               "plot 'locking_map.csv' using 1:3 with linespoints title 'beat', "
               "'' using 1:($2 > 0 ? 0 : 1/0) with points pt 5 title 'locked'\n");
}

}  // namespace qes::experiments
