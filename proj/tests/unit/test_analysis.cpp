#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "qes/analysis/autocorrelation.hpp"
#include "qes/analysis/circular.hpp"
#include "qes/analysis/distribution.hpp"
#include "qes/analysis/entropy.hpp"
#include "qes/analysis/locking.hpp"
#include "qes/analysis/normality.hpp"
#include "qes/analysis/phase_fit.hpp"
#include "qes/analysis/spectrum.hpp"
#include "qes/config.hpp"
#include "qes/core/rng.hpp"
#include "qes/experiments/locking_map.hpp"

using namespace qes;
using namespace qes::analysis;
using std::numbers::pi;

namespace {

std::vector<double> normals(std::uint64_t seed, std::size_t n, double sd = 1.0) {
  NormalStream g(seed, StreamDomain::user, 0, 0);
  std::vector<double> v(n);
  for (auto& x : v) x = sd * g();
  return v;
}

std::vector<double> uniforms(std::uint64_t seed, std::size_t n, double lo, double hi) {
  auto u = make_stream(seed, StreamDomain::user, 1, 0);
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * u.uniform();
  return v;
}

}  // namespace

// ---- autocorrelation ----

TEST(Autocorrelation, NoiseFloor) {
  const auto r = autocorrelation(uniforms(1, 10'000'000, 0, 1), 1);
  EXPECT_NEAR(r.noise_floor, 3.162e-4, 1e-7);
  EXPECT_EQ(r.n, 10'000'000u);
}

TEST(Autocorrelation, Alternating) {
  std::vector<double> x(10001);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = i % 2 ? -1.0 : 1.0;
  const auto r = autocorrelation(x, 3);
  EXPECT_DOUBLE_EQ(r.rho[0], 1.0);
  EXPECT_NEAR(r.rho[1], -1.0, 1e-3);
  EXPECT_NEAR(r.rho[2], 1.0, 1e-3);
}

TEST(Autocorrelation, WhiteNoiseStaysUnderFourSigma) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto x = uniforms(seed, 1'000'000, 0, 1);
    const auto r = autocorrelation(x, 500);
    double mx = 0.0;
    for (std::size_t k = 1; k <= 500; ++k) mx = std::max(mx, std::abs(r.rho[k]));
    EXPECT_LT(mx, 4.0 * r.noise_floor) << seed;
  }
}

TEST(Autocorrelation, ShiftAndScale) {
  const auto x = normals(4, 20000);
  auto shifted = x, scaled = x;
  for (auto& v : shifted) v += 1000.0;
  for (auto& v : scaled) v *= -3.0;
  const auto a = autocorrelation(x, 10), b = autocorrelation(shifted, 10), c = autocorrelation(scaled, 10);
  for (std::size_t k = 0; k <= 10; ++k) {
    EXPECT_NEAR(b.gamma[k], a.gamma[k], 1e-9);
    EXPECT_NEAR(c.gamma[k], 9.0 * a.gamma[k], 1e-12);
    EXPECT_NEAR(c.rho[k], a.rho[k], 1e-12);
  }
}

TEST(Autocorrelation, ReversalSymmetric) {
  auto x = normals(5, 50000);
  for (std::size_t i = 1; i < x.size(); ++i) x[i] += 0.6 * x[i - 1];
  auto rev = x;
  std::reverse(rev.begin(), rev.end());
  const auto a = autocorrelation(x, 20), b = autocorrelation(rev, 20);
  for (std::size_t k = 0; k <= 20; ++k) EXPECT_NEAR(a.rho[k], b.rho[k], 2.0 * a.noise_floor);
}

TEST(Autocorrelation, ConstantInputThrows) {
  EXPECT_THROW(autocorrelation(std::vector<double>(100, 2.0), 5), DegenerateInputError);
  EXPECT_THROW(autocorrelation(std::vector<double>(5, 2.0), 5), DegenerateInputError);
}

TEST(NoiseSubtraction, ZeroOffPulseIsPlain) {
  const auto y = normals(6, 5000);
  const auto a = noise_subtracted_autocorrelation(y, std::vector<double>(5000, 0.0), 8);
  const auto b = autocorrelation(y, 8);
  for (std::size_t k = 0; k <= 8; ++k) EXPECT_DOUBLE_EQ(a.rho[k], b.rho[k]);
}

TEST(NoiseSubtraction, RecoversSignalCovariance) {
  // x: AR(1) with coefficient phi and innovation sd s; y = x + noise; off = independent noise
  const std::size_t n = 100000;
  const double phi = 0.5, s = 0.5, sn = 0.5;
  auto x = normals(7, n, s);
  for (std::size_t i = 1; i < n; ++i) x[i] += phi * x[i - 1];
  const auto noise = normals(8, n, sn), off = normals(9, n, sn);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + noise[i];
  const auto r = noise_subtracted_autocorrelation(y, off, 20);
  const double g0 = s * s / (1.0 - phi * phi);
  for (std::size_t k = 0; k <= 20; ++k)
    EXPECT_NEAR(r.gamma[k], g0 * std::pow(phi, double(k)), 5.0 / std::sqrt(double(n))) << k;
}

TEST(NoiseSubtraction, SameStreamCancels) {
  const auto y = normals(10, 5000);
  const auto r = noise_subtracted_autocorrelation(y, y, 10);
  for (double g : r.gamma) EXPECT_EQ(g, 0.0);
  EXPECT_TRUE(r.rho.empty());
}

// ---- arcsine ----

TEST(Arcsine, CosineOfUniformPhasePasses) {
  auto u = uniforms(11, 100000, 0, 2 * pi);
  for (auto& v : u) v = std::cos(v);
  EXPECT_LT(arcsine_ks(u).distance, 0.01);
}

TEST(Arcsine, UniformRejected) {
  const auto r = arcsine_ks(uniforms(12, 100000, -1, 1));
  EXPECT_GT(r.distance, 0.1);
  EXPECT_LT(r.p_value, 1e-6);
}

TEST(Arcsine, ConstantThrows) {
  EXPECT_THROW(arcsine_ks(std::vector<double>(1000, 3.0)), DegenerateInputError);
}

TEST(Ks, TwoSampleAndPValues) {
  const auto a = normals(13, 20000), b = normals(14, 20000);
  const auto same = ks_two_sample(a, b);
  EXPECT_LT(same.distance, 0.02);
  EXPECT_GT(same.p_value, 1e-3);
  auto shifted = b;
  for (auto& v : shifted) v += 0.2;
  EXPECT_LT(ks_two_sample(a, shifted).p_value, 1e-10);
  EXPECT_NEAR(kolmogorov_q(1.36), 0.0494, 5e-4);
  EXPECT_NEAR(kolmogorov_q(1.0), 0.2700, 5e-4);
  EXPECT_DOUBLE_EQ(kolmogorov_q(0.0), 1.0);
}

TEST(Histogram, BinsAndOverflow) {
  const auto h = histogram({-2.0, 0.0, 0.25, 0.5, 1.0, 3.0}, 4, 0.0, 1.0);
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{1, 1, 1, 1}));
  EXPECT_EQ(h.below, 1u);
  EXPECT_EQ(h.above, 1u);
  EXPECT_EQ(h.total(), 6u);
  EXPECT_THROW(histogram({}, 0, 0, 1), ConfigError);
}

// ---- D'Agostino-Pearson ----

TEST(Normality, MatchesReferenceValues) {
  // reference values from scipy.stats.normaltest, skewtest, kurtosistest
  std::vector<double> x;
  for (int i = 1; i <= 200; ++i) x.push_back(std::pow(std::fmod(i * 0.6180339887498949, 1.0), 3));
  const auto r = dagostino_pearson(x);
  EXPECT_NEAR(r.k2, 28.27355663604062, 1e-9);
  EXPECT_NEAR(r.p_value, 7.252290376222584e-07, 1e-15);
  EXPECT_NEAR(r.z_skew, 5.317056925460728, 1e-10);
  EXPECT_NEAR(r.z_kurt, -0.04962144144155349, 1e-10);
  std::vector<double> y;
  for (int i = 1; i <= 100; ++i) y.push_back(std::fmod(i * 0.7548776662466927, 1.0));
  const auto s = dagostino_pearson(y);
  EXPECT_NEAR(s.k2, 33.07187154340017, 1e-9);
  EXPECT_NEAR(s.p_value, 6.584674953043286e-08, 1e-16);
}

TEST(Normality, NormalDrawsPass) {
  int pass = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) pass += dagostino_pearson(normals(1000 + seed, 10000)).p_value > 1e-3;
  EXPECT_GE(pass, 198);
}

TEST(Normality, ExponentialFails) {
  auto u = uniforms(15, 10000, 0, 1);
  for (auto& v : u) v = -std::log1p(-v);
  EXPECT_LT(dagostino_pearson(u).p_value, 1e-6);
}

TEST(Normality, NullPValuesUniform) {
  std::vector<double> p;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) p.push_back(dagostino_pearson(normals(5000 + seed, 1000)).p_value);
  EXPECT_LT(ks_test(p, [](double x) { return std::clamp(x, 0.0, 1.0); }).distance, 0.05);
}

TEST(Normality, DegenerateInputs) {
  EXPECT_THROW(dagostino_pearson(std::vector<double>(10, 1.0)), DegenerateInputError);
  EXPECT_THROW(dagostino_pearson(std::vector<double>(100, 1.0)), DegenerateInputError);
}

// ---- circular statistics ----

TEST(Circular, Examples) {
  EXPECT_NEAR(circular_stats({0.4, 0.4, 0.4}).variance, 0.0, 1e-15);
  EXPECT_NEAR(circular_stats({0, pi / 2, pi, 1.5 * pi}).variance, 1.0, 1e-15);
  EXPECT_NEAR(circular_stats({0.1, 0.3}).mean_direction, 0.2, 1e-12);
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    EXPECT_GT(circular_stats(uniforms(100 + seed, 10000, -pi, pi)).variance, 0.98);
  EXPECT_THROW(circular_stats({1.0}), DegenerateInputError);
}

TEST(Circular, WrapPhase) {
  EXPECT_DOUBLE_EQ(wrap_phase(0.5), 0.5);
  EXPECT_NEAR(wrap_phase(2 * pi + 0.5), 0.5, 1e-12);
  EXPECT_NEAR(wrap_phase(-pi - 0.1), pi - 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(wrap_phase(pi), -pi);
}

// ---- phase fit ----

namespace {

detection::AnalogTrace synth_segment(double phi, double noise_sd, std::uint64_t seed) {
  const DetuningProfile th{-4 * pi, 2 * pi * 1e-3};
  detection::AnalogTrace seg{6.0, 0.02, std::vector<double>(251)};
  NormalStream g(seed, StreamDomain::user, 2, 0);
  for (std::size_t j = 0; j < seg.size(); ++j)
    seg.values[j] = 3.0 * std::cos(th(seg.time(j)) + phi) + 10.0 + noise_sd * g();
  return seg;
}

}  // namespace

TEST(PhaseFit, RecoversPhase) {
  const DetuningProfile th{-4 * pi, 2 * pi * 1e-3};
  // 20 dB: noise power is 1% of the tone power A^2 / 2
  const double sd = 3.0 / std::sqrt(200.0);
  const auto f = extract_pulse_phase(synth_segment(1.0, sd, 1), 6.0, th);
  EXPECT_NEAR(f.phase, 1.0, 0.05);
  EXPECT_NEAR(f.amplitude, 3.0, 0.1);
  EXPECT_NEAR(f.offset, 10.0, 0.1);
  EXPECT_FALSE(f.low_confidence);
  const auto z = extract_pulse_phase(synth_segment(0.0, 0.0, 1), 6.0, th);
  EXPECT_NEAR(z.phase, 0.0, 1e-9);
  EXPECT_NEAR(z.residual_rms, 0.0, 1e-9);
  const auto a = extract_pulse_phase(synth_segment(0.4, sd, 2), 6.0, th);
  const auto b = extract_pulse_phase(synth_segment(0.4 + pi, sd, 2), 6.0, th);
  EXPECT_NEAR(std::abs(wrap_phase(b.phase - a.phase)), pi, 0.05);
}

TEST(PhaseFit, FlatSegmentIsLowConfidence) {
  detection::AnalogTrace flat{0.0, 0.02, std::vector<double>(100, 5.0)};
  NormalStream g(3, StreamDomain::user, 0, 0);
  for (auto& v : flat.values) v += g();
  EXPECT_TRUE(extract_pulse_phase(flat, 0.0, {-4 * pi, 0.0}, 3.0).low_confidence);
  EXPECT_THROW(extract_pulse_phase({0.0, 0.02, {1, 2, 3}}, 0.0, {}), DegenerateInputError);
}

// ---- min-entropy ----

TEST(MinEntropy, Examples) {
  EXPECT_DOUBLE_EQ(min_entropy(std::vector<std::uint64_t>(256, 7)), 8.0);
  std::vector<std::uint64_t> one(256, 0);
  one[17] = 1000;
  EXPECT_DOUBLE_EQ(min_entropy(one), 0.0);
  EXPECT_THROW(min_entropy(std::vector<std::uint64_t>(4, 0)), DegenerateInputError);
  EXPECT_THROW(code_counts({300}, 8), ConfigError);
}

TEST(MinEntropy, QuantizedArcsine) {
  // Oracle: edge-bin mass by numerical integration of the arcsine density
  // 1/(pi sqrt(1-x^2)); with x = -1 + u^2 the integrand is 2/(pi sqrt(2-u^2)).
  const double u_max = std::sqrt(2.0 / 256);
  const int steps = 100000;
  double p_edge = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double u = (i + 0.5) * u_max / steps;
    p_edge += 2.0 / (pi * std::sqrt(2.0 - u * u)) * u_max / steps;
  }
  EXPECT_NEAR(p_edge, 0.039815, 1e-6);
  const double h_oracle = -std::log2(p_edge);
  EXPECT_NEAR(h_oracle, 4.650, 1e-3);
  // exact bin masses from the CDF, scaled to counts
  std::vector<std::uint64_t> counts(256);
  for (int k = 0; k < 256; ++k) {
    const double a = -1.0 + 2.0 * k / 256, b = -1.0 + 2.0 * (k + 1) / 256;
    counts[k] = static_cast<std::uint64_t>(std::llround(1e12 * (arcsine_cdf(b) - arcsine_cdf(a))));
  }
  EXPECT_NEAR(min_entropy(counts), h_oracle, 1e-6);
}

TEST(MinEntropy, BoundsAndBinMerging) {
  auto u = make_stream(16, StreamDomain::user, 0, 0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint64_t> c(64);
    for (auto& v : c) v = u() % 50;
    c[u() % 64] += 1;
    const double h = min_entropy(c);
    ASSERT_GE(h, 0.0);
    ASSERT_LE(h, 6.0);
    const std::size_t i = u() % 64, j = (i + 1 + u() % 63) % 64;
    auto merged = c;
    merged[i] += merged[j];
    merged[j] = 0;
    ASSERT_LE(min_entropy(merged), h + 1e-12);
  }
}

// ---- locking classification ----

namespace {

experiments::LockingPoint cw_point(double kappa, double omega) {
  ExperimentConfig cfg;
  cfg.sim.coupling = sim::make_coupling(kappa, 0.0, 0.02, sim::CouplingMode::delayed);
  cfg.sim.pump2.mode = sim::PumpMode::cw;
  cfg.sim.detuning.beta0 = 0.0;
  return experiments::locking_point(cfg, omega, 0);
}

}  // namespace

TEST(LockClassify, InsideAdlerRangeLocks) { EXPECT_TRUE(cw_point(5.0, 5.0).locked); }

TEST(LockClassify, NoCouplingNeverLocks) {
  for (double omega : {-8.0, 3.0}) EXPECT_FALSE(cw_point(0.0, omega).locked) << omega;
}

TEST(LockClassify, FarDetuningBeats) { EXPECT_FALSE(cw_point(5.0, 50.0).locked); }

TEST(LockClassify, ShortInputThrows) {
  EXPECT_THROW(lock_classify_beat(std::vector<std::complex<double>>(49, 1.0), 0.01), DegenerateInputError);
  EXPECT_THROW(lock_classify_phases(std::vector<double>(10, 0.0)), DegenerateInputError);
}

TEST(LockClassify, PhaseBatches) {
  EXPECT_TRUE(lock_classify_phases(std::vector<double>(100, 0.3)).locked);
  EXPECT_FALSE(lock_classify_phases(uniforms(17, 1000, -pi, pi)).locked);
}

TEST(LockClassify, SyntheticBeat) {
  std::vector<std::complex<double>> tone(6000), still(6000);
  NormalStream g(18, StreamDomain::user, 0, 0);
  for (std::size_t j = 0; j < tone.size(); ++j) {
    tone[j] = std::polar(1.0, 2 * pi * 3.0 * 0.01 * j) + 0.05 * std::complex<double>(g(), g());
    still[j] = std::polar(1.0, 0.7) + 0.05 * std::complex<double>(g(), g());
  }
  const auto a = lock_classify_beat(tone, 0.01);
  EXPECT_FALSE(a.locked);
  EXPECT_NEAR(a.beat_ghz, 3.0, 0.05);
  EXPECT_TRUE(lock_classify_beat(still, 0.01).locked);
}

TEST(Spectrum, PeakAtToneFrequency) {
  std::vector<std::complex<double>> x(1000);
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = std::polar(1.0, -2 * pi * 5.0 * 0.01 * j);
  const auto p = periodogram(x, 0.01);
  const auto at = std::max_element(p.power.begin(), p.power.end()) - p.power.begin();
  EXPECT_NEAR(p.freq_ghz[at], -5.0, 0.1);
  EXPECT_TRUE(std::is_sorted(p.freq_ghz.begin(), p.freq_ghz.end()));
}
