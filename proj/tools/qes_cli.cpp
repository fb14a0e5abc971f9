// qes: experiment drivers for the two-laser entropy source simulator.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qes/qes.hpp"

namespace fs = std::filesystem;
using namespace qes;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> pulses;
  std::optional<double> dt;
  std::size_t workers = default_workers();
  bool plot = false;
};

void add_common(CLI::App* sub, Common& o, bool pulses = true) {
  sub->add_option("--config", o.config, "JSON configuration file (defaults apply when omitted)");
  sub->add_option("--seed", o.seed, "master seed (overrides the config)");
  sub->add_option("--out", o.out, "output directory (overrides out_dir)");
  if (pulses) sub->add_option("--pulses", o.pulses, "number of pulses (per batch for histogram-stability)");
  sub->add_option("--dt", o.dt, "integration step in ns");
  sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  sub->add_flag("--plot", o.plot, "also write gnuplot scripts next to the CSVs");
}

ExperimentConfig resolve(const Common& o, std::optional<Experiment> exp) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (exp) c.experiment = *exp;
  if (o.seed) {
    c.seed = *o.seed;
    c.sim.grid.seed = *o.seed;
  }
  if (o.out) c.out_dir = *o.out;
  if (o.dt) c.sim.grid.dt = *o.dt;
  if (o.pulses && exp) {
    if (*exp == Experiment::histogram_stability) c.histogram_stability.batch_pulses = *o.pulses;
    if (*exp == Experiment::autocorr) c.autocorr.pulses = *o.pulses;
    if (*exp == Experiment::generate) c.generate.pulses = *o.pulses;
  }
  // every driver records on the detection grid
  c.sim.grid.record_stride = record_stride_for(c.sim, c.pulse.record_interval_ns);
  c.validate();
  return c;
}

// The run config, without out_dir so reruns into other directories compare equal.
void save_config(const ExperimentConfig& c) {
  auto j = to_json(c);
  j.erase("out_dir");
  experiments::write_text(fs::path(c.out_dir) / "config.json", j.dump(2) + "\n");
}

int run_experiment(const Common& o, Experiment e) {
  const auto c = resolve(o, e);
  const fs::path dir = c.out_dir;
  switch (e) {
    case Experiment::locking_map: {
      const auto m = experiments::run_locking_map(c, o.workers);
      experiments::write_locking_map(dir, m, o.plot);
      std::printf("locked points %zu of %zu; window around 0: [%g, %g] rad/ns, width %g (Adler 4 kappa = %g)%s\n",
                  m.locked_total, m.points.size(), m.window_lo, m.window_hi, m.window_width, m.adler_width,
                  m.contiguous ? "" : "; locked points outside the central window");
      break;
    }
    case Experiment::beat_traces: {
      const auto t = experiments::run_beat_traces(c, o.workers);
      experiments::write_beat_traces(dir, t, o.plot);
      for (const auto& b : t)
        std::printf("Omega %g rad/ns: NZD t* = %.3f ns (|Omega|/beta0 = %.3f ns), %zu track points\n", b.omega,
                    b.t_star_ns, b.expected_t_star_ns, b.track.size());
      std::printf("NZD times %s with |Omega|\n", experiments::nzd_monotone(t) ? "increase" : "do NOT increase");
      break;
    }
    case Experiment::histogram_stability: {
      const auto h = experiments::run_histogram_stability(c, o.workers);
      experiments::write_histogram_stability(dir, h, o.plot);
      for (std::size_t b = 0; b < h.batches.size(); ++b)
        std::printf("batch %zu: arcsine KS %.4f, circular variance %.4f\n", b, h.batches[b].arcsine.distance,
                    h.batches[b].circular_variance);
      double pmin = 1.0;
      for (const auto& p : h.pairs) pmin = std::min(pmin, p.ks.p_value);
      std::printf("smallest pairwise two-sample KS p = %.4g over %zu pairs\n", pmin, h.pairs.size());
      break;
    }
    case Experiment::autocorr: {
      const auto r = experiments::run_autocorr(c, o.workers);
      experiments::write_autocorr(dir, r, o.plot);
      std::printf("n = %zu, floor 1/sqrt(n) = %.3g, rho(1) = %.4g, max |rho(k)| for k = 2..%zu: %.3g at k = %zu "
                  "(4/sqrt(n) = %.3g), D'Agostino-Pearson p = %.4g\n",
                  r.n, r.floor, r.rho1, c.autocorr.report_lag, r.max_abs_rho, r.max_abs_lag, 4.0 * r.floor,
                  r.normality.p_value);
      break;
    }
    case Experiment::generate: {
      const auto r = experiments::run_generate(c, o.workers);
      experiments::write_generate(dir, r);
      std::printf("H_inf = %.3f bits/sample on %zu calibration pulses; extractor n = %zu, m = %zu; wrote %zu bits\n",
                  r.h_min, r.calibration_pulses, r.record.n, r.record.m, r.record.output_bits);
      break;
    }
  }
  save_config(c);
  return exit_code::ok;
}

int run_simulate(const Common& o, std::size_t cycles, const std::string& format) {
  auto c = resolve(o, std::nullopt);
  c.sim.grid.n_cycles = cycles;
  const auto tr = sim::simulate(c.sim);
  const fs::path dir = c.out_dir;
  if (format == "csv") {
    auto os = experiments::open_out(dir / "trajectory.csv");
    sim::write_trajectory_csv(os, tr);
  } else {
    auto os = experiments::open_out(dir / "trajectory.bin", true);
    sim::write_trajectory_binary(os, tr);
  }
  save_config(c);
  std::printf("wrote %zu records over %zu cycles\n", tr.size(), cycles);
  return exit_code::ok;
}

int run_extract(const Common& o, const std::string& codes_path, std::optional<double> h_given) {
  const auto c = resolve(o, std::nullopt);
  std::ifstream in(codes_path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + codes_path);
  const auto f = detection::read_codes_binary(in);
  if (f.codes.empty()) throw DegenerateInputError("code file is empty");
  const double h = h_given ? *h_given : analysis::min_entropy(analysis::code_counts(f.codes, f.bits));
  if (h < c.generate.h_min_floor) throw LowEntropyError(h, c.generate.h_min_floor);
  const std::size_t n = c.generate.block_bits;
  const std::size_t m = extraction::output_length(n, std::min(1.0, h / f.bits), c.generate.epsilon);
  extraction::ExtractionRecord rec{n, m, c.generate.epsilon, h, f.bits, 0, 0, 0};
  extraction::BitVector bits;
  if (m > 0) {
    const extraction::ExtractorConfig ec{n, m, extraction::random_seed_bits(c.seed, n + m - 1), c.generate.epsilon};
    const auto input = extraction::pack_codes(f.codes, f.bits);
    bits = extraction::extract_blocks(input, ec);
    rec.seed_fingerprint = extraction::seed_fingerprint(ec.seed);
    rec.blocks = input.size() / n;
    rec.output_bits = bits.size();
  }
  const fs::path dir = c.out_dir;
  {
    auto os = experiments::open_out(dir / "bits.bin", true);
    extraction::write_bits(os, bits);
  }
  auto os = experiments::open_out(dir / "bits.meta");
  extraction::write_record(os, rec);
  std::printf("H_inf = %.3f bits/sample; n = %zu, m = %zu; wrote %zu bits\n", h, n, m, bits.size());
  return exit_code::ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-laser phase-diffusion entropy source: simulation, detection, statistics, extraction"};
  app.require_subcommand(1);

  Common o;
  struct Sub {
    const char* name;
    Experiment exp;
    const char* help;
  };
  const Sub subs[] = {
      {"locking-map", Experiment::locking_map, "sweep Omega for two CW lasers and classify locking"},
      {"beat-traces", Experiment::beat_traces, "chirped beat traces and near-zero-detuning times"},
      {"histogram-stability", Experiment::histogram_stability, "per-batch arcsine histograms and pairwise KS"},
      {"autocorr", Experiment::autocorr, "noise-subtracted autocorrelation and normality test"},
      {"generate", Experiment::generate, "end-to-end bit generation with min-entropy sizing"},
  };
  std::optional<Experiment> chosen;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, o);
    sub->callback([&chosen, e = s.exp] { chosen = e; });
  }

  auto* validate = app.add_subcommand("validate-config", "parse and validate a config, print it normalized");
  validate->add_option("--config", o.config, "JSON configuration file")->required();

  std::size_t cycles = 1;
  std::string format = "csv";
  auto* simulate = app.add_subcommand("simulate", "integrate and write a trajectory");
  add_common(simulate, o, false);
  simulate->add_option("--cycles", cycles, "recorded modulation cycles")->check(CLI::PositiveNumber);
  simulate->add_option("--format", format, "csv or bin")->check(CLI::IsMember({"csv", "bin"}));

  std::string codes_path;
  std::optional<double> h_given;
  auto* extract = app.add_subcommand("extract", "Toeplitz-hash a packed code file");
  add_common(extract, o, false);
  extract->add_option("--codes", codes_path, "code file written by generate (codes.bin)")->required();
  extract->add_option("--h-min", h_given, "min-entropy per sample to size the extractor (default: estimate)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_code::ok : exit_code::config;
  }

  try {
    if (chosen) return run_experiment(o, *chosen);
    if (validate->parsed()) {
      const auto c = load_config(o.config);
      std::cout << dump_config(c);
      return exit_code::ok;
    }
    if (simulate->parsed()) return run_simulate(o, cycles, format);
    if (extract->parsed()) return run_extract(o, codes_path, h_given);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return exit_code::config;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "numerical divergence: %s\n", e.what());
    return exit_code::divergence;
  } catch (const LowEntropyError& e) {
    std::fprintf(stderr, "low entropy: %s\n", e.what());
    return exit_code::low_entropy;
  } catch (const DegenerateInputError& e) {
    std::fprintf(stderr, "degenerate data: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return exit_code::ok;
}
