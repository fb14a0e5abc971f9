#pragma once

// JSON experiment configuration.
//
// Physical parameters use their usual symbols as keys (alpha, gamma, tau, R_sp,
// kappa, psi, tau_d, Omega, beta0, P_bar, delta_tau, M, t_mod, dt). Every key
// is optional and falls back to the default below; unknown keys are rejected
// so a typo cannot silently leave a default in place.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qes/analysis/locking.hpp"
#include "qes/core/error.hpp"
#include "qes/pipeline.hpp"
#include "qes/sim/params.hpp"

namespace qes {

enum class Experiment { locking_map, beat_traces, histogram_stability, autocorr, generate };
enum class FullScaleMode { percentile, fixed };

struct LockingMapSettings {
  double omega_min = -40.0;  ///< rad/ns
  double omega_max = 40.0;
  std::size_t points = 21;
  std::size_t cycles = 9;            ///< recorded t_mod periods per point
  double record_interval_ns = 0.01;  ///< beat sampling interval

  friend bool operator==(const LockingMapSettings&, const LockingMapSettings&) = default;
};

struct BeatTracesSettings {
  std::vector<double> omegas{-2.0 * std::numbers::pi * 4.0, -2.0 * std::numbers::pi * 6.0,
                             -2.0 * std::numbers::pi * 8.0};
  double beta0 = 2.0 * std::numbers::pi;  ///< rad/ns^2, replaces detuning.beta0 for this experiment
  double track_begin_ns = 2.0;            ///< f(t) kept only inside this part of the cycle
  double track_end_ns = 10.5;
  double hysteresis = 0.05;  ///< zero-crossing hysteresis as a fraction of the peak |signal| in the window

  friend bool operator==(const BeatTracesSettings&, const BeatTracesSettings&) = default;
};

struct HistogramSettings {
  std::size_t batches = 6;
  std::size_t batch_pulses = 20000;
  std::size_t bins = 64;

  friend bool operator==(const HistogramSettings&, const HistogramSettings&) = default;
};

struct AutocorrSettings {
  std::size_t pulses = 1000000;
  std::size_t max_lag = 500;
  std::size_t report_lag = 100;  ///< |rho(k)| for 2 <= k <= report_lag is compared with 4 / sqrt(n)

  friend bool operator==(const AutocorrSettings&, const AutocorrSettings&) = default;
};

struct GenerateSettings {
  std::size_t pulses = 100000;
  double calibration_fraction = 0.2;
  FullScaleMode full_scale = FullScaleMode::percentile;  ///< fixed: use detection.digitizer.v_min/v_max
  double lo_pct = 0.1;
  double hi_pct = 99.9;
  std::size_t block_bits = 4096;
  double epsilon = 0x1.0p-32;
  double h_min_floor = 0.5;  ///< bits per sample

  friend bool operator==(const GenerateSettings&, const GenerateSettings&) = default;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::generate;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  sim::SimConfig sim = default_sim();
  PulseSpec pulse{};
  analysis::LockThresholds locking{};
  LockingMapSettings locking_map{};
  BeatTracesSettings beat_traces{};
  HistogramSettings histogram_stability{};
  AutocorrSettings autocorr{};
  GenerateSettings generate{};

  /// High-loss chip with a 2 GHz beat.
  static sim::SimConfig default_sim() {
    sim::SimConfig c = sim::nominal_config();
    c.coupling = sim::make_coupling(sim::kKappaHighLoss, 0.0, 0.02, sim::CouplingMode::delayed);
    c.detuning.omega = -2.0 * std::numbers::pi * 2.0;
    return c;
  }

  void validate() const {
    // the record stride is derived from the sampling interval, not configured
    sim::SimConfig s = sim;
    s.grid.record_stride = 1;
    s.validate();
    s.grid.record_stride = record_stride_for(s, pulse.record_interval_ns);
    s.validate();
    pulse.chain.validate();
    pulse.in_pulse.validate(sim.t_mod());
    pulse.off_pulse.validate(sim.t_mod());
    if (pulse.chunk_cycles == 0) throw ConfigError("sampling.chunk_cycles must be >= 1");
    record_stride_for(sim, pulse.record_interval_ns);
    record_stride_for(sim, locking_map.record_interval_ns);
    if (locking_map.points < 2 || !(locking_map.omega_min < locking_map.omega_max))
      throw ConfigError("locking_map needs >= 2 points over omega_min < omega_max");
    if (beat_traces.omegas.empty()) throw ConfigError("beat_traces.omegas is empty");
    if (!(beat_traces.beta0 >= 0.0)) throw ConfigError("beat_traces.beta0 must be >= 0");
    if (!(beat_traces.track_begin_ns >= 0.0 && beat_traces.track_begin_ns < beat_traces.track_end_ns &&
          beat_traces.track_end_ns <= sim.t_mod()))
      throw ConfigError("beat_traces track window must lie inside the cycle");
    if (!(beat_traces.hysteresis >= 0.0 && beat_traces.hysteresis < 1.0))
      throw ConfigError("beat_traces.hysteresis must lie in [0, 1)");
    if (histogram_stability.batches < 1 || histogram_stability.batch_pulses < 100 || histogram_stability.bins < 1)
      throw ConfigError("histogram_stability needs >= 1 batch of >= 100 pulses and >= 1 bin");
    if (autocorr.max_lag < 2 || autocorr.pulses <= autocorr.max_lag)
      throw ConfigError("autocorr needs max_lag >= 2 and pulses > max_lag");
    if (autocorr.report_lag < 2 || autocorr.report_lag > autocorr.max_lag)
      throw ConfigError("autocorr.report_lag must lie in [2, max_lag]");
    const auto& g = generate;
    if (!(g.calibration_fraction > 0.0 && g.calibration_fraction < 1.0))
      throw ConfigError("generate.calibration_fraction must lie in (0, 1)");
    if (!(g.lo_pct >= 0.0 && g.lo_pct < g.hi_pct && g.hi_pct <= 100.0))
      throw ConfigError("generate percentiles need 0 <= lo_pct < hi_pct <= 100");
    if (g.block_bits < 2) throw ConfigError("generate.block_bits must be >= 2");
    if (!(g.epsilon > 0.0 && g.epsilon < 1.0)) throw ConfigError("generate.epsilon must lie in (0, 1)");
    if (!(g.h_min_floor >= 0.0)) throw ConfigError("generate.h_min_floor must be >= 0");
    if (g.full_scale == FullScaleMode::fixed) pulse.chain.digitizer.validate();
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace config_detail {

using nlohmann::json;

template <class E>
struct EnumNames;

template <>
struct EnumNames<Experiment> {
  static constexpr std::pair<Experiment, const char*> v[] = {{Experiment::locking_map, "locking-map"},
                                                             {Experiment::beat_traces, "beat-traces"},
                                                             {Experiment::histogram_stability, "histogram-stability"},
                                                             {Experiment::autocorr, "autocorr"},
                                                             {Experiment::generate, "generate"}};
};
template <>
struct EnumNames<FullScaleMode> {
  static constexpr std::pair<FullScaleMode, const char*> v[] = {{FullScaleMode::percentile, "percentile"},
                                                                {FullScaleMode::fixed, "fixed"}};
};
template <>
struct EnumNames<sim::CouplingMode> {
  static constexpr std::pair<sim::CouplingMode, const char*> v[] = {{sim::CouplingMode::instantaneous, "instantaneous"},
                                                                    {sim::CouplingMode::delayed, "delayed"}};
};
template <>
struct EnumNames<sim::ChirpReset> {
  static constexpr std::pair<sim::ChirpReset, const char*> v[] = {{sim::ChirpReset::per_cycle, "per_cycle"},
                                                                  {sim::ChirpReset::never, "never"}};
};
template <>
struct EnumNames<sim::PumpMode> {
  static constexpr std::pair<sim::PumpMode, const char*> v[] = {{sim::PumpMode::cw, "cw"},
                                                                {sim::PumpMode::gain_switched, "gain_switched"}};
};
template <>
struct EnumNames<detection::Port> {
  static constexpr std::pair<detection::Port, const char*> v[] = {{detection::Port::plus, "plus"},
                                                                  {detection::Port::minus, "minus"},
                                                                  {detection::Port::balanced, "balanced"},
                                                                  {detection::Port::sum, "sum"}};
};
template <>
struct EnumNames<detection::FilterKind> {
  static constexpr std::pair<detection::FilterKind, const char*> v[] = {{detection::FilterKind::lowpass, "lowpass"},
                                                                        {detection::FilterKind::highpass, "highpass"}};
};
template <>
struct EnumNames<detection::Interpolation> {
  static constexpr std::pair<detection::Interpolation, const char*> v[] = {
      {detection::Interpolation::nearest, "nearest"}, {detection::Interpolation::linear, "linear"}};
};

template <class E>
std::string enum_name(E e) {
  for (const auto& [k, s] : EnumNames<E>::v)
    if (k == e) return s;
  throw ConfigError("unnamed enum value");
}

template <class E>
E enum_parse(const std::string& s, const std::string& where) {
  std::string options;
  for (const auto& [k, name] : EnumNames<E>::v) {
    if (s == name) return k;
    options += options.empty() ? name : std::string(", ") + name;
  }
  throw ConfigError(where + ": unknown value '" + s + "' (expected one of " + options + ")");
}

/// Reads the keys of one object and complains about any it did not consume.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError("unknown config key " + where(k));
  }

  Reader(const Reader&) = delete;
  Reader& operator=(const Reader&) = delete;

  template <class T>
  void get(const char* key, T& dst) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_enum_v<T>) {
        dst = enum_parse<T>(it->template get<std::string>(), where(key));
      } else if constexpr (std::is_same_v<T, double>) {
        if (!it->is_number()) throw ConfigError(where(key) + " must be a number");
        dst = it->template get<double>();
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!it->is_number_integer() || (std::is_unsigned_v<T> && it->is_number_integer() && !it->is_number_unsigned()))
          throw ConfigError(where(key) + " must be a " + (std::is_unsigned_v<T> ? "non-negative " : "") + "integer");
        dst = it->template get<T>();
      } else {
        dst = it->template get<T>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  /// Nested object; `fn(Reader&)` is only called when the key is present.
  template <class Fn>
  void object(const char* key, Fn&& fn) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    Reader sub(*it, where(key));
    fn(sub);
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }
  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void read(Reader& r, sim::LaserParams& p) {
  r.get("alpha", p.alpha);
  r.get("gamma", p.gamma);
  r.get("tau", p.tau);
  r.get("R_sp", p.r_sp);
}
inline json write(const sim::LaserParams& p) {
  return {{"alpha", p.alpha}, {"gamma", p.gamma}, {"tau", p.tau}, {"R_sp", p.r_sp}};
}

inline void read(Reader& r, sim::PumpSpec& p) {
  r.get("mode", p.mode);
  r.get("P_bar", p.p_bar);
  r.get("delta_tau", p.delta_tau);
  r.get("M", p.m);
  r.get("t_mod", p.t_mod);
}
inline json write(const sim::PumpSpec& p) {
  return {{"mode", enum_name(p.mode)}, {"P_bar", p.p_bar}, {"delta_tau", p.delta_tau}, {"M", p.m}, {"t_mod", p.t_mod}};
}

inline void read(Reader& r, detection::FilterSpec& f) {
  r.get("kind", f.kind);
  r.get("cutoff_ghz", f.cutoff_ghz);
  r.get("order", f.order);
}
inline json write(const detection::FilterSpec& f) {
  return {{"kind", enum_name(f.kind)}, {"cutoff_ghz", f.cutoff_ghz}, {"order", f.order}};
}

inline void read(Reader& r, detection::SamplingPolicy& s) {
  r.get("delay_ns", s.delay_ns);
  r.get("interpolation", s.interpolation);
}
inline json write(const detection::SamplingPolicy& s) {
  return {{"delay_ns", s.delay_ns}, {"interpolation", enum_name(s.interpolation)}};
}

}  // namespace config_detail

inline nlohmann::json to_json(const ExperimentConfig& c) {
  using config_detail::enum_name;
  using config_detail::write;
  using nlohmann::json;
  const auto& s = c.sim;
  const auto& ch = c.pulse.chain;
  json j;
  j["experiment"] = enum_name(c.experiment);
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["laser1"] = write(s.laser1);
  j["laser2"] = write(s.laser2);
  j["coupling"] = {{"kappa", s.coupling.kappa},
                   {"psi", s.coupling.psi},
                   {"tau_d", s.coupling.tau_d},
                   {"mode", enum_name(s.coupling.mode)}};
  j["detuning"] = {
      {"Omega", s.detuning.omega}, {"beta0", s.detuning.beta0}, {"chirp_reset", enum_name(s.detuning.chirp_reset)}};
  j["pump1"] = write(s.pump1);
  j["pump2"] = write(s.pump2);
  j["grid"] = {{"dt", s.grid.dt},
               {"warmup_cycles", s.grid.warmup_cycles},
               {"noise_refinement", s.grid.noise_refinement},
               {"n_cycles", s.grid.n_cycles}};
  json det;
  det["port"] = enum_name(ch.port);
  det["photodiode"] = write(ch.photodiode);
  det["amplifier"] = {{"gain_db", ch.amplifier.gain_db}, {"noise_sigma", ch.amplifier.noise_sigma}};
  det["scope"] = write(ch.scope);
  det["highpass"] = ch.highpass ? write(*ch.highpass) : json(nullptr);
  det["digitizer"] = {{"rate_gsps", ch.digitizer.rate_gsps},
                      {"bits", ch.digitizer.bits},
                      {"v_min", ch.digitizer.v_min},
                      {"v_max", ch.digitizer.v_max}};
  j["detection"] = det;
  j["sampling"] = {{"in_pulse", write(c.pulse.in_pulse)},
                   {"off_pulse", write(c.pulse.off_pulse)},
                   {"phase_window",
                    {{"enabled", c.pulse.phase_window.enabled},
                     {"begin_ns", c.pulse.phase_window.begin_ns},
                     {"end_ns", c.pulse.phase_window.end_ns}}},
                   {"chunk_cycles", c.pulse.chunk_cycles},
                   {"settle_cycles", c.pulse.settle_cycles},
                   {"record_interval_ns", c.pulse.record_interval_ns}};
  const auto& L = c.locking;
  j["locking"] = {{"circular_variance", L.circular_variance}, {"peak_to_floor", L.peak_to_floor},
                  {"peak_fraction", L.peak_fraction},         {"min_cycles", L.min_cycles},
                  {"guard_bins", L.guard_bins},               {"floor_bins", L.floor_bins},
                  {"min_slips", L.min_slips}};
  const auto& lm = c.locking_map;
  j["locking_map"] = {{"omega_min", lm.omega_min},
                      {"omega_max", lm.omega_max},
                      {"points", lm.points},
                      {"cycles", lm.cycles},
                      {"record_interval_ns", lm.record_interval_ns}};
  const auto& bt = c.beat_traces;
  j["beat_traces"] = {{"omegas", bt.omegas},
                      {"beta0", bt.beta0},
                      {"track_begin_ns", bt.track_begin_ns},
                      {"track_end_ns", bt.track_end_ns},
                      {"hysteresis", bt.hysteresis}};
  const auto& hs = c.histogram_stability;
  j["histogram_stability"] = {{"batches", hs.batches}, {"batch_pulses", hs.batch_pulses}, {"bins", hs.bins}};
  const auto& ac = c.autocorr;
  j["autocorr"] = {{"pulses", ac.pulses}, {"max_lag", ac.max_lag}, {"report_lag", ac.report_lag}};
  const auto& g = c.generate;
  j["generate"] = {{"pulses", g.pulses},
                   {"calibration_fraction", g.calibration_fraction},
                   {"full_scale", enum_name(g.full_scale)},
                   {"lo_pct", g.lo_pct},
                   {"hi_pct", g.hi_pct},
                   {"block_bits", g.block_bits},
                   {"epsilon", g.epsilon},
                   {"h_min_floor", g.h_min_floor}};
  return j;
}

inline ExperimentConfig from_json(const nlohmann::json& j) {
  using config_detail::read;
  using config_detail::Reader;
  ExperimentConfig c;
  {
    Reader r(j, "");
    auto& s = c.sim;
    auto& ch = c.pulse.chain;
    r.get("experiment", c.experiment);
    r.get("seed", c.seed);
    r.get("out_dir", c.out_dir);
    r.object("laser1", [&](Reader& o) { read(o, s.laser1); });
    r.object("laser2", [&](Reader& o) { read(o, s.laser2); });
    r.object("coupling", [&](Reader& o) {
      o.get("kappa", s.coupling.kappa);
      o.get("psi", s.coupling.psi);
      o.get("tau_d", s.coupling.tau_d);
      o.get("mode", s.coupling.mode);
    });
    s.coupling.psi = sim::fold_phase(s.coupling.psi);
    r.object("detuning", [&](Reader& o) {
      o.get("Omega", s.detuning.omega);
      o.get("beta0", s.detuning.beta0);
      o.get("chirp_reset", s.detuning.chirp_reset);
    });
    r.object("pump1", [&](Reader& o) { read(o, s.pump1); });
    r.object("pump2", [&](Reader& o) { read(o, s.pump2); });
    r.object("grid", [&](Reader& o) {
      o.get("dt", s.grid.dt);
      o.get("warmup_cycles", s.grid.warmup_cycles);
      o.get("noise_refinement", s.grid.noise_refinement);
      o.get("n_cycles", s.grid.n_cycles);
    });
    r.object("detection", [&](Reader& o) {
      o.get("port", ch.port);
      o.object("photodiode", [&](Reader& f) { read(f, ch.photodiode); });
      o.object("amplifier", [&](Reader& a) {
        a.get("gain_db", ch.amplifier.gain_db);
        a.get("noise_sigma", ch.amplifier.noise_sigma);
      });
      o.object("scope", [&](Reader& f) { read(f, ch.scope); });
      if (o.has("highpass") && !o.raw("highpass").is_null()) {
        detection::FilterSpec hp{detection::FilterKind::highpass, 0.03, 1};
        o.object("highpass", [&](Reader& f) { read(f, hp); });
        ch.highpass = hp;
      } else if (o.has("highpass")) {
        o.raw("highpass");
        ch.highpass.reset();
      }
      o.object("digitizer", [&](Reader& d) {
        d.get("rate_gsps", ch.digitizer.rate_gsps);
        d.get("bits", ch.digitizer.bits);
        d.get("v_min", ch.digitizer.v_min);
        d.get("v_max", ch.digitizer.v_max);
      });
    });
    r.object("sampling", [&](Reader& o) {
      o.object("in_pulse", [&](Reader& p) { read(p, c.pulse.in_pulse); });
      o.object("off_pulse", [&](Reader& p) { read(p, c.pulse.off_pulse); });
      o.object("phase_window", [&](Reader& p) {
        p.get("enabled", c.pulse.phase_window.enabled);
        p.get("begin_ns", c.pulse.phase_window.begin_ns);
        p.get("end_ns", c.pulse.phase_window.end_ns);
      });
      o.get("chunk_cycles", c.pulse.chunk_cycles);
      o.get("settle_cycles", c.pulse.settle_cycles);
      o.get("record_interval_ns", c.pulse.record_interval_ns);
    });
    r.object("locking", [&](Reader& o) {
      auto& L = c.locking;
      o.get("circular_variance", L.circular_variance);
      o.get("peak_to_floor", L.peak_to_floor);
      o.get("peak_fraction", L.peak_fraction);
      o.get("min_cycles", L.min_cycles);
      o.get("guard_bins", L.guard_bins);
      o.get("floor_bins", L.floor_bins);
      o.get("min_slips", L.min_slips);
    });
    r.object("locking_map", [&](Reader& o) {
      auto& lm = c.locking_map;
      o.get("omega_min", lm.omega_min);
      o.get("omega_max", lm.omega_max);
      o.get("points", lm.points);
      o.get("cycles", lm.cycles);
      o.get("record_interval_ns", lm.record_interval_ns);
    });
    r.object("beat_traces", [&](Reader& o) {
      auto& bt = c.beat_traces;
      o.get("omegas", bt.omegas);
      o.get("beta0", bt.beta0);
      o.get("track_begin_ns", bt.track_begin_ns);
      o.get("track_end_ns", bt.track_end_ns);
      o.get("hysteresis", bt.hysteresis);
    });
    r.object("histogram_stability", [&](Reader& o) {
      auto& hs = c.histogram_stability;
      o.get("batches", hs.batches);
      o.get("batch_pulses", hs.batch_pulses);
      o.get("bins", hs.bins);
    });
    r.object("autocorr", [&](Reader& o) {
      o.get("pulses", c.autocorr.pulses);
      o.get("max_lag", c.autocorr.max_lag);
      o.get("report_lag", c.autocorr.report_lag);
    });
    r.object("generate", [&](Reader& o) {
      auto& g = c.generate;
      o.get("pulses", g.pulses);
      o.get("calibration_fraction", g.calibration_fraction);
      o.get("full_scale", g.full_scale);
      o.get("lo_pct", g.lo_pct);
      o.get("hi_pct", g.hi_pct);
      o.get("block_bits", g.block_bits);
      o.get("epsilon", g.epsilon);
      o.get("h_min_floor", g.h_min_floor);
    });
  }
  c.sim.grid.seed = c.seed;
  c.validate();
  c.sim.grid.record_stride = record_stride_for(c.sim, c.pulse.record_interval_ns);
  return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string dump_config(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

}  // namespace qes
