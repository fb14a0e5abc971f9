#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "qes/analysis/circular.hpp"
#include "qes/analysis/locking.hpp"
#include "qes/config.hpp"
#include "qes/experiments/locking_map.hpp"
#include "qes/pipeline.hpp"
#include "qes/sim/delay_line.hpp"
#include "qes/sim/lk.hpp"
#include "qes/sim/pump.hpp"
#include "qes/sim/simulate.hpp"
#include "qes/sim/trajectory_io.hpp"

using namespace qes;
using namespace qes::sim;
using std::numbers::pi;

namespace {

// Both lasers CW, no noise, no coupling.
SimConfig quiet_cw(double p = 8.0, double t_mod = 10.0) {
  SimConfig c;
  c.laser1.r_sp = c.laser2.r_sp = 0.0;
  c.coupling = make_coupling(0.0, 0.0, 0.02, CouplingMode::delayed);
  c.pump1 = {PumpMode::cw, p, 5.0, 5, t_mod};
  c.pump2 = {PumpMode::cw, p, 5.0, 5, t_mod};
  c.detuning.omega = 0.0;
  c.detuning.beta0 = 0.0;
  return c;
}

}  // namespace

// ---- pump, chirp, closed-form helpers ----

TEST(Pump, Examples) {
  const PumpSpec gs{PumpMode::gain_switched, 8.0, 5.0, 5, 12.0};
  EXPECT_DOUBLE_EQ(pump_value(0.0, gs), 8.0);
  // cycle edge: 8 (-1/2 + 3/2 exp(-1.2^10)); the pulse has not fully decayed
  EXPECT_NEAR(pump_value(6.0, gs), -3.9754447542798586, 1e-12);
  EXPECT_NEAR(pump_value(-6.0, gs), -3.9754447542798586, 1e-12);
  // 8 (-1/2 + 3/2 e^-1) = 12/e - 4
  EXPECT_NEAR(pump_value(5.0, gs), 0.414553294057308, 1e-12);
  EXPECT_NEAR(pump_value(30.0, gs), -4.0, 1e-12);
  EXPECT_DOUBLE_EQ(pump_from_cycle_start(6.0, gs), 8.0);
  const PumpSpec cw{PumpMode::cw, 3.5, 5.0, 5, 12.0};
  EXPECT_DOUBLE_EQ(pump_value(4.0, cw), 3.5);
}

TEST(Pump, SymmetricAndBounded) {
  const PumpSpec gs{PumpMode::gain_switched, 8.0, 5.0, 5, 12.0};
  for (double t = 0.0; t <= 6.0; t += 0.01) {
    EXPECT_DOUBLE_EQ(pump_value(t, gs), pump_value(-t, gs));
    EXPECT_LE(pump_value(t, gs), 8.0);
    EXPECT_GE(pump_value(t, gs), -4.0);
  }
}

TEST(Chirp, Examples) {
  EXPECT_DOUBLE_EQ(chirp_detuning(7.3, {10.0, 0.0, ChirpReset::per_cycle}, 12.0), 10.0);
  const DetuningSpec nominal{0.0, 2.0 * pi * 1e-3, ChirpReset::per_cycle};
  EXPECT_NEAR(chirp_detuning(5.0, nominal, 12.0), 2.0 * pi * 5e-3, 1e-15);
  EXPECT_NEAR(chirp_detuning(17.0, nominal, 12.0), 2.0 * pi * 5e-3, 1e-15);
  EXPECT_DOUBLE_EQ(chirp_detuning(3.0, {6.0, 2.0, ChirpReset::per_cycle}, 3.0), 6.0);
  EXPECT_DOUBLE_EQ(chirp_detuning(3.0, {6.0, 2.0, ChirpReset::never}, 3.0), 12.0);
}

TEST(Coupling, InstantaneousValidity) {
  const auto tab = validate_instantaneous_coupling(make_coupling(5.0, 0.0, 0.02, CouplingMode::instantaneous), 2.0);
  EXPECT_TRUE(tab.valid);
  EXPECT_DOUBLE_EQ(tab.lhs, 0.02 * 5.0);
  EXPECT_DOUBLE_EQ(tab.rhs, 1.0 / std::sqrt(5.0));
  EXPECT_TRUE(validate_instantaneous_coupling(make_coupling(0.0, 0.0, 3.0, CouplingMode::delayed), 7.0).valid);
  const auto big = validate_instantaneous_coupling(make_coupling(50.0, 0.0, 0.02, CouplingMode::delayed), 2.0);
  EXPECT_FALSE(big.valid);
  EXPECT_DOUBLE_EQ(big.lhs, 1.0);
}

TEST(Coupling, PsiFolded) {
  EXPECT_NEAR(make_coupling(1.0, -pi / 2, 0.02, CouplingMode::delayed).psi, 1.5 * pi, 1e-15);
  EXPECT_NEAR(make_coupling(1.0, 5 * pi, 0.02, CouplingMode::delayed).psi, pi, 1e-14);
  EXPECT_DOUBLE_EQ(make_coupling(1.0, 2 * pi, 0.02, CouplingMode::delayed).psi, 0.0);
}

TEST(Adler, Range) {
  EXPECT_DOUBLE_EQ(adler_lock_range(5.0), 10.0);
  EXPECT_DOUBLE_EQ(adler_lock_range(0.0), 0.0);
  EXPECT_DOUBLE_EQ(adler_lock_range(kKappaHighLoss), 0.01);
  EXPECT_THROW(adler_lock_range(-1.0), ConfigError);
}

TEST(Pump, FromCurrentRatio) {
  EXPECT_DOUBLE_EQ(pump_from_current_ratio(1.0, 3.7), 0.0);
  EXPECT_DOUBLE_EQ(pump_from_current_ratio(2.0, 16.0), 8.0);
  EXPECT_DOUBLE_EQ(pump_from_current_ratio(0.5, 16.0), -4.0);
  EXPECT_THROW(pump_from_current_ratio(-0.1, 16.0), ConfigError);
}

// ---- configuration errors ----

TEST(SimConfigValidation, RejectsBadValues) {
  auto bad = [](auto mutate) {
    SimConfig c;
    mutate(c);
    return c;
  };
  EXPECT_THROW(bad([](SimConfig& c) { c.laser1.gamma = 0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](SimConfig& c) { c.laser2.tau = -1; }).validate(), ConfigError);
  EXPECT_THROW(bad([](SimConfig& c) { c.laser1.r_sp = -0.1; }).validate(), ConfigError);
  EXPECT_THROW(bad([](SimConfig& c) { c.laser1.alpha = NAN; }).validate(), ConfigError);
  EXPECT_THROW(bad([](SimConfig& c) { c.coupling.kappa = -1; }).validate(), ConfigError);
  EXPECT_THROW(bad([](SimConfig& c) { c.detuning.beta0 = -1; }).validate(), ConfigError);
  EXPECT_THROW(bad([](SimConfig& c) { c.pump2.m = 0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](SimConfig& c) { c.pump2.delta_tau = 12.0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](SimConfig& c) { c.grid.dt = 0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](SimConfig& c) { c.grid.record_stride = 0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](SimConfig& c) { c.grid.record_stride = 7; }).validate(), ConfigError);
  EXPECT_THROW(bad([](SimConfig& c) {
                 c.coupling.kappa = 1.0;
                 c.grid.dt = 0.03;
               }).validate(),
               ConfigError);
  EXPECT_NO_THROW(SimConfig{}.validate());
}

// ---- lk_step ----

TEST(LkStep, FixedPointIsStationary) {
  const SimConfig c = quiet_cw();
  const auto k = StepConstants::make(c, 1e-4);
  for (double phase : {0.0, 0.7, -2.1, 3.0}) {
    const cplx e = std::polar(std::sqrt(8.0), phase);
    const LaserPairState s{e, e * cplx(0, 1), 0.0, 0.0, 0.0};
    const auto d = lk_drift(s, k, 8.0, 8.0, 0.0, s.e1, s.e2);
    EXPECT_LT(std::abs(d.de1), 1e-12);
    EXPECT_LT(std::abs(d.dn1), 1e-12);
    const auto next = lk_step(s, k, {8.0, 8.0, 0.0, s.e1, s.e2, {0, 0, 0, 0}});
    EXPECT_LT(std::abs(next.e1 - s.e1), 1e-8);
    EXPECT_LT(std::abs(next.e2 - s.e2), 1e-8);
    EXPECT_LT(std::abs(next.n1 - s.n1), 1e-8);
    EXPECT_LT(std::abs(next.n2 - s.n2), 1e-8);
  }
}

TEST(LkStep, DivergenceNamesVariable) {
  const SimConfig c = quiet_cw();
  const auto k = StepConstants::make(c, 1e-4);
  const LaserPairState s{{INFINITY, 0.0}, {1.0, 0.0}, 0.0, 0.0, 2.5};
  try {
    lk_step(s, k, {8.0, 8.0, 0.0, s.e1, s.e2, {0, 0, 0, 0}});
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    EXPECT_FALSE(e.variable().empty());
    EXPECT_NEAR(e.time_ns(), 2.5001, 1e-12);
  }
}

TEST(LkStep, NoiseIncrementVariance) {
  // Drift switched off by hand: only the Langevin increments accumulate.
  const double r = 0.2, dt = 1e-4;
  const std::size_t steps = 10, draws = 100000;
  StepConstants k{};
  k.dt = dt;
  k.sig1 = k.sig2 = std::sqrt(r * dt);
  NormalStream g(11, StreamDomain::user, 0, 0);
  double v[4] = {0, 0, 0, 0};
  for (std::size_t d = 0; d < draws; ++d) {
    double x[6] = {0, 0, 0, 0, 0, 0};
    for (std::size_t s = 0; s < steps; ++s) lk_step_raw(x, k, 0, 0, 0, 0, 0, 0, 0, g.take(4));
    for (int q = 0; q < 4; ++q) v[q] += x[q] * x[q];
    EXPECT_EQ(x[4], 0.0);
  }
  const double expect = r * dt * static_cast<double>(steps);
  for (double q : v) EXPECT_NEAR(q / draws / expect, 1.0, 0.05);
}

// ---- delay line ----

TEST(DelayLine, ReadsDelayedValue) {
  DelayLine d(0.02, 1e-4);
  EXPECT_EQ(d.whole_steps(), 200u);
  EXPECT_DOUBLE_EQ(d.fraction(), 0.0);
  EXPECT_EQ(d.depth(), 202u);
  d.fill(0, 0, 0, 0);
  for (int k = 1; k <= 500; ++k) {
    const double x[4] = {double(k), -double(k), 2.0 * k, 0.5};
    d.push(x);
    double out[4];
    d.read(out);
    const double want = k >= 200 ? double(k - 200) : 0.0;
    ASSERT_DOUBLE_EQ(out[0], want) << k;
    ASSERT_DOUBLE_EQ(out[1], -want);
    ASSERT_DOUBLE_EQ(out[2], 2.0 * want);
  }
}

TEST(DelayLine, InterpolatesFraction) {
  DelayLine d(0.25, 0.1);  // 2.5 steps
  EXPECT_EQ(d.whole_steps(), 2u);
  EXPECT_NEAR(d.fraction(), 0.5, 1e-12);
  d.fill(0, 0, 0, 0);
  for (int k = 1; k <= 10; ++k) {
    const double x[4] = {double(k), 0, 0, 0};
    d.push(x);
  }
  double out[4];
  d.read(out);
  EXPECT_DOUBLE_EQ(out[0], 7.5);
}

// ---- simulate ----

TEST(Simulate, CwFixedPointAfterTenNs) {
  SimConfig c = quiet_cw();
  c.grid.warmup_cycles = 0;
  c.grid.n_cycles = 1;
  Integrator in(c);
  in.skip_cycles(1);  // 10 ns
  const auto s = in.state();
  EXPECT_NEAR(std::norm(s.e1), 8.0, 0.08);
  EXPECT_NEAR(std::norm(s.e2), 8.0, 0.08);
  EXPECT_LT(std::abs(s.n1), 1e-3);
  EXPECT_LT(std::abs(s.n2), 1e-3);
}

TEST(Simulate, BelowThresholdDecays) {
  SimConfig c = quiet_cw(-4.0);
  Integrator in(c);
  in.skip_cycles(2);  // 20 tau
  const auto s = in.state();
  EXPECT_LT(std::abs(s.n1 + 4.0), 1e-6);
  EXPECT_LT(std::abs(s.n2 + 4.0), 1e-6);
  EXPECT_LT(std::abs(s.e1), 1e-12);
}

TEST(Simulate, GaugeInvariance) {
  SimConfig c = quiet_cw();
  c.pump2 = {PumpMode::gain_switched, 8.0, 5.0, 5, 10.0};
  c.detuning = {3.0, 0.5, ChirpReset::per_cycle};
  const cplx u1 = std::polar(1.0, 0.9), u2 = std::polar(1.0, -2.3);
  Integrator a(c), b(c);
  LaserPairState s0;
  s0.e1 *= u1;
  s0.e2 *= u2;
  b.set_state(s0);
  std::vector<double> xa, xb;
  a.run_cycles(2, [&](std::size_t, double, const double* x) { xa.insert(xa.end(), x, x + 6); });
  b.run_cycles(2, [&](std::size_t, double, const double* x) { xb.insert(xb.end(), x, x + 6); });
  ASSERT_EQ(xa.size(), xb.size());
  for (std::size_t i = 0; i < xa.size(); i += 6) {
    const cplx e1a{xa[i], xa[i + 1]}, e2a{xa[i + 2], xa[i + 3]};
    const cplx e1b{xb[i], xb[i + 1]}, e2b{xb[i + 2], xb[i + 3]};
    const double s1 = 1.0 + std::abs(e1a), s2 = 1.0 + std::abs(e2a);
    ASSERT_LT(std::abs(e1b - u1 * e1a), 1e-10 * s1) << i;
    ASSERT_LT(std::abs(e2b - u2 * e2a), 1e-10 * s2) << i;
    ASSERT_LT(std::abs(std::norm(e1b) - std::norm(e1a)), 1e-10 * s1 * s1);
    ASSERT_LT(std::abs(xb[i + 4] - xa[i + 4]), 1e-10);
    ASSERT_LT(std::abs(xb[i + 5] - xa[i + 5]), 1e-10);
  }
}

TEST(Simulate, DecoupledLaserOneIgnoresLaserTwo) {
  for (double r : {0.0, 0.2}) {
    SimConfig x = quiet_cw();
    x.laser1.r_sp = r;
    x.grid.n_cycles = 1;
    x.grid.warmup_cycles = 1;
    SimConfig y = x;
    y.laser2 = {4.0, 90.0, 2.0, 0.7};
    y.pump2 = {PumpMode::gain_switched, 5.0, 3.0, 2, 10.0};
    y.detuning = {17.0, 3.0, ChirpReset::never};
    const auto a = simulate(x), b = simulate(y);
    EXPECT_EQ(a.e1, b.e1);
    EXPECT_EQ(a.n1, b.n1);
    EXPECT_NE(a.n2, b.n2);
  }
}

TEST(Simulate, Deterministic) {
  SimConfig c;
  c.coupling = make_coupling(0.005, 0.0, 0.02, CouplingMode::delayed);
  c.grid.n_cycles = 2;
  c.grid.warmup_cycles = 1;
  c.grid.seed = 77;
  const auto a = simulate(c, 3), b = simulate(c, 3);
  EXPECT_EQ(a, b);
  const auto other = simulate(c, 4);
  EXPECT_NE(a.e2, other.e2);
  c.grid.seed = 78;
  EXPECT_NE(a.e2, simulate(c, 3).e2);
}

TEST(Simulate, TrajectoryBookkeeping) {
  SimConfig c;
  c.pump1.t_mod = c.pump2.t_mod = 10.0;
  c.grid = {1e-4, 3, 0, 100, 1, 1};
  const auto tr = simulate(c);
  // 3 cycles of 10 ns at 1e-4 ns, every 100th step
  EXPECT_EQ(tr.size(), 3u * 100000u / 100u);
  EXPECT_EQ(tr.e1.size(), tr.size());
  EXPECT_EQ(tr.e2.size(), tr.size());
  EXPECT_EQ(tr.n2.size(), tr.size());
  ASSERT_EQ(tr.cycle_starts.size(), 3u);
  for (std::size_t i = 1; i < 3; ++i) EXPECT_GT(tr.cycle_starts[i], tr.cycle_starts[i - 1]);
  EXPECT_EQ(tr.cycle_starts[1], tr.records_per_cycle);
  EXPECT_DOUBLE_EQ(tr.dt_record, 0.01);
}

TEST(Simulate, DivergenceOnCoarseStep) {
  SimConfig c = quiet_cw(8.0, 12.0);
  c.grid.dt = 0.05;
  c.grid.record_stride = 1;
  try {
    simulate(c);
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    EXPECT_FALSE(e.variable().empty());
    EXPECT_GT(e.time_ns(), 0.0);
  }
}

TEST(Simulate, NoiseRefinementReproducesHalfStepPath) {
  // With negligible drift the field is the Brownian path itself, so dt with
  // two sub-increments must land where two steps of dt/2 land.
  SimConfig c = quiet_cw(0.0);
  c.laser1 = c.laser2 = {0.0, 1e-12, 1.0, 0.2};
  c.grid.warmup_cycles = 0;
  SimConfig fine = c;
  c.grid.noise_refinement = 2;
  fine.grid.dt = c.grid.dt / 2;
  Integrator a(c), b(fine);
  a.skip_cycles(1);
  b.skip_cycles(1);
  const auto sa = a.state(), sb = b.state();
  EXPECT_NEAR(sa.e1.real(), sb.e1.real(), 1e-9);
  EXPECT_NEAR(sa.e1.imag(), sb.e1.imag(), 1e-9);
  EXPECT_NEAR(sa.e2.real(), sb.e2.real(), 1e-9);
  EXPECT_GT(std::abs(sa.e1), 0.1);  // the path actually moved
}

TEST(Simulate, HighLossPulsePhasesDiffer) {
  ExperimentConfig cfg;
  cfg.pulse.chunk_cycles = 100;
  const auto s = run_pulses(cfg.sim, cfg.pulse, 100, 1);
  ASSERT_EQ(s.phases.size(), 100u);
  const std::set<double> distinct(s.phases.begin(), s.phases.end());
  EXPECT_GT(distinct.size(), 90u);
  EXPECT_GT(analysis::circular_stats(s.phases).variance, 0.5);
}

// ---- locking behaviour ----

namespace {

SimConfig cw_pair(double kappa, double omega, double psi = 0.0) {
  SimConfig c;
  c.coupling = make_coupling(kappa, psi, 0.02, CouplingMode::delayed);
  c.pump2.mode = PumpMode::cw;
  c.detuning = {omega, 0.0, ChirpReset::per_cycle};
  c.grid.n_cycles = 5;  // 60 ns kept after the warm-up
  c.grid.record_stride = 100;
  return c;
}

}  // namespace

TEST(Locking, PhaseSettlesInsideRange) {
  const auto tr = simulate(cw_pair(5.0, 5.0));
  std::vector<double> rel;
  const double t_end = tr.time(tr.size() - 1);
  for (std::size_t j = 0; j < tr.size(); ++j)
    if (tr.time(j) >= t_end - 50.0) rel.push_back(std::arg(tr.e1[j] * std::conj(tr.e2[j])));
  EXPECT_LT(analysis::circular_stats(rel).variance, 0.05);
}

TEST(Locking, BeatLineOutsideRange) {
  const double kappa = 5.0, omega = 10.0 * kappa;
  const auto tr = simulate(cw_pair(kappa, omega));
  std::vector<cplx> beat(tr.size());
  for (std::size_t j = 0; j < tr.size(); ++j) beat[j] = tr.e2[j] * std::conj(tr.e1[j]);
  const auto r = analysis::lock_classify_beat(beat, tr.dt_record);
  EXPECT_FALSE(r.locked);
  EXPECT_GT(r.metric, 10.0);
  // pulled toward zero but not past it
  const double w = 2.0 * pi * std::abs(r.beat_ghz);
  EXPECT_GT(w, 0.8 * omega);
  EXPECT_LT(w, 1.05 * omega);
}

TEST(Locking, PsiRobustnessOnCoarseGrid) {
  // 11 points over +-4 kappa; the classification should barely depend on psi.
  ExperimentConfig cfg;
  cfg.sim = cw_pair(5.0, 0.0);
  cfg.locking_map.cycles = 9;
  std::size_t changed = 0;
  for (int i = 0; i <= 10; ++i) {
    const double omega = -20.0 + 4.0 * i;
    ExperimentConfig a = cfg, b = cfg;
    b.sim.coupling = make_coupling(5.0, pi / 2, 0.02, CouplingMode::delayed);
    const auto pa = experiments::locking_point(a, omega, i);
    const auto pb = experiments::locking_point(b, omega, i);
    if (pa.locked != pb.locked) ++changed;
  }
  EXPECT_LE(changed, 2u);
}

// ---- trajectory files ----

TEST(TrajectoryIo, RoundTrips) {
  SimConfig c;
  c.grid.n_cycles = 2;
  c.grid.warmup_cycles = 1;
  c.grid.record_stride = 1000;
  const auto tr = simulate(c);
  std::stringstream bin;
  write_trajectory_binary(bin, tr);
  EXPECT_EQ(read_trajectory_binary(bin), tr);
  std::stringstream csv;
  write_trajectory_csv(csv, tr);
  const auto back = read_trajectory_csv(csv);
  EXPECT_EQ(back.e1, tr.e1);
  EXPECT_EQ(back.n2, tr.n2);
  EXPECT_EQ(back.cycle_starts, tr.cycle_starts);
  EXPECT_EQ(back.records_per_cycle, tr.records_per_cycle);
  EXPECT_DOUBLE_EQ(back.dt_record, tr.dt_record);
}

TEST(TrajectoryIo, RejectsGarbage) {
  std::stringstream bad("not a trajectory");
  EXPECT_ANY_THROW(read_trajectory_binary(bad));
}
