#pragma once

// Several independent batches from one configuration: arcsine fit per batch
// and pairwise two-sample KS between batches.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qes/analysis/circular.hpp"
#include "qes/analysis/distribution.hpp"
#include "qes/config.hpp"
#include "qes/experiments/output.hpp"
#include "qes/pipeline.hpp"

namespace qes::experiments {

struct BatchResult {
  std::uint64_t seed = 0;
  PulseSamples samples;
  analysis::ArcsineFit arcsine{};
  analysis::Histogram histogram;  ///< of the normalized samples over [-1, 1]
  double circular_variance = 0.0;
};

struct PairKs {
  std::size_t a, b;
  analysis::KsResult ks;
};

struct HistogramStability {
  std::vector<BatchResult> batches;
  std::vector<PairKs> pairs;
};

/// Batch b runs under derive_seed(master, b).
inline HistogramStability run_histogram_stability(const ExperimentConfig& cfg,
                                                  std::size_t workers = default_workers()) {
  cfg.validate();
  if (cfg.sim.pump2.mode != sim::PumpMode::gain_switched)
    throw ConfigError("histogram-stability needs pump2 gain-switched");
  const auto& hs = cfg.histogram_stability;
  HistogramStability out;
  out.batches.resize(hs.batches);
  for (std::size_t b = 0; b < hs.batches; ++b) {
    auto& r = out.batches[b];
    sim::SimConfig c = cfg.sim;
    r.seed = derive_seed(cfg.seed, b);
    c.grid.seed = r.seed;
    r.samples = run_pulses(c, cfg.pulse, hs.batch_pulses, workers);
    r.arcsine = analysis::arcsine_ks(r.samples.in_pulse);
    r.histogram = analysis::histogram(r.arcsine.normalized, hs.bins, -1.0, 1.0);
    if (r.samples.phases.size() >= 2) r.circular_variance = analysis::circular_stats(r.samples.phases).variance;
  }
  for (std::size_t a = 0; a < hs.batches; ++a)
    for (std::size_t b = a + 1; b < hs.batches; ++b)
      out.pairs.push_back({a, b, analysis::ks_two_sample(out.batches[a].samples.in_pulse, out.batches[b].samples.in_pulse)});
  return out;
}

inline void write_histogram_stability(const fs::path& dir, const HistogramStability& h, bool plot) {
  auto bs = open_out(dir / "batches.csv");
  bs << "batch,seed,pulses,arcsine_ks_distance,arcsine_ks_p,band_lo,band_hi,circular_variance\n";
  for (std::size_t b = 0; b < h.batches.size(); ++b) {
    const auto& r = h.batches[b];
    bs << b << ',' << r.seed << ',' << r.samples.size() << ',' << num(r.arcsine.distance) << ','
       << num(r.arcsine.p_value) << ',' << num(r.arcsine.lo) << ',' << num(r.arcsine.hi) << ','
       << num(r.circular_variance) << '\n';
  }
  auto hg = open_out(dir / "histograms.csv");
  hg << "bin_lo,bin_hi";
  for (std::size_t b = 0; b < h.batches.size(); ++b) hg << ",count_batch" << b;
  hg << '\n';
  if (!h.batches.empty()) {
    const auto& e = h.batches[0].histogram.edges;
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
      hg << num(e[i]) << ',' << num(e[i + 1]);
      for (const auto& r : h.batches) hg << ',' << r.histogram.counts[i];
      hg << '\n';
    }
  }
  auto ks = open_out(dir / "ks_matrix.csv");
  ks << "batch_a,batch_b,ks_distance,ks_p\n";
  for (const auto& p : h.pairs) ks << p.a << ',' << p.b << ',' << num(p.ks.distance) << ',' << num(p.ks.p_value) << '\n';
  if (plot) {
    std::string gp = "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'normalized sample'\nplot ";
    for (std::size_t b = 0; b < h.batches.size(); ++b)
      gp += (b ? ", " : "") + std::string("'histograms.csv' using (($1+$2)/2):") + std::to_string(b + 3) +
            " with steps title 'batch " + std::to_string(b) + "'";
    write_text(dir / "histograms.gp", gp + "\n");
  }
}

}  // namespace qes::experiments
