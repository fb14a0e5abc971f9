#pragma once

// End to end: simulate, detect, sample one value per pulse, digitize, estimate
// min-entropy on a calibration split, size the extractor, and hash the rest.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qes/analysis/entropy.hpp"
#include "qes/config.hpp"
#include "qes/detection/digitizer.hpp"
#include "qes/detection/io.hpp"
#include "qes/experiments/output.hpp"
#include "qes/extraction/io.hpp"
#include "qes/extraction/toeplitz.hpp"
#include "qes/pipeline.hpp"

namespace qes::experiments {

struct GenerateResult {
  std::size_t calibration_pulses = 0;
  detection::DigitizerSpec digitizer{};  ///< full scale actually used
  std::vector<std::uint16_t> codes;      ///< every pulse, calibration first
  std::size_t clipped_low = 0, clipped_high = 0;
  double h_min = 0.0;                    ///< bits per sample, calibration split
  extraction::ExtractionRecord record{};
  extraction::BitVector bits;
};

/// Digitize the samples and extract; throws LowEntropyError under the floor.
inline GenerateResult generate_from_samples(const std::vector<double>& samples, const ExperimentConfig& cfg) {
  const auto& g = cfg.generate;
  GenerateResult r;
  r.calibration_pulses = static_cast<std::size_t>(std::floor(g.calibration_fraction * static_cast<double>(samples.size())));
  if (r.calibration_pulses < 1 || r.calibration_pulses >= samples.size())
    throw ConfigError("generate: calibration split leaves an empty part");
  const std::vector<double> calib(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(r.calibration_pulses));
  r.digitizer = g.full_scale == FullScaleMode::percentile
                    ? detection::percentile_full_scale(calib, cfg.pulse.chain.digitizer, g.lo_pct, g.hi_pct)
                    : cfg.pulse.chain.digitizer;
  detection::ClipCounter clips;
  r.codes = detection::quantize_all(samples, r.digitizer, &clips);
  r.clipped_low = clips.low;
  r.clipped_high = clips.high;
  const std::vector<std::uint16_t> cal_codes(r.codes.begin(), r.codes.begin() + static_cast<std::ptrdiff_t>(r.calibration_pulses));
  r.h_min = analysis::min_entropy(analysis::code_counts(cal_codes, r.digitizer.bits));
  if (r.h_min < g.h_min_floor) throw LowEntropyError(r.h_min, g.h_min_floor);

  const int bits = r.digitizer.bits;
  const double h_bit = std::min(1.0, r.h_min / bits);
  const std::size_t n = g.block_bits;
  const std::size_t m = extraction::output_length(n, h_bit, g.epsilon);
  r.record = {n, m, g.epsilon, r.h_min, bits, 0, 0, 0};
  if (m == 0) return r;
  const std::vector<std::uint16_t> rest(r.codes.begin() + static_cast<std::ptrdiff_t>(r.calibration_pulses), r.codes.end());
  extraction::ExtractorConfig ec{n, m, extraction::random_seed_bits(cfg.seed, n + m - 1), g.epsilon};
  r.bits = extraction::extract_blocks(extraction::pack_codes(rest, bits), ec);
  r.record.seed_fingerprint = extraction::seed_fingerprint(ec.seed);
  r.record.blocks = rest.size() * static_cast<std::size_t>(bits) / n;
  r.record.output_bits = r.bits.size();
  return r;
}

inline GenerateResult run_generate(const ExperimentConfig& cfg, std::size_t workers = default_workers()) {
  cfg.validate();
  PulseSpec ps = cfg.pulse;
  ps.phase_window.enabled = false;
  const auto s = run_pulses(cfg.sim, ps, cfg.generate.pulses, workers);
  return generate_from_samples(s.in_pulse, cfg);
}

inline void write_generate(const fs::path& dir, const GenerateResult& r) {
  {
    auto os = open_out(dir / "bits.bin", true);
    extraction::write_bits(os, r.bits);
  }
  {
    auto os = open_out(dir / "bits.meta");
    extraction::write_record(os, r.record);
    os << "calibration_pulses=" << r.calibration_pulses << "\n";
    os << "total_pulses=" << r.codes.size() << "\n";
    os << "full_scale_v_min=" << num(r.digitizer.v_min) << "\nfull_scale_v_max=" << num(r.digitizer.v_max) << "\n";
    os << "clipped_low=" << r.clipped_low << "\nclipped_high=" << r.clipped_high << "\n";
  }
  auto os = open_out(dir / "codes.bin", true);
  detection::write_codes_binary(os, r.codes, r.digitizer.bits);
}

}  // namespace qes::experiments
