#pragma once

// Noise-subtracted autocorrelation of in-pulse samples, with off-pulse samples
// of the same cycles as the noise reference, and a normality test on the
// coefficients beyond lag 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "qes/analysis/autocorrelation.hpp"
#include "qes/analysis/normality.hpp"
#include "qes/config.hpp"
#include "qes/experiments/output.hpp"
#include "qes/pipeline.hpp"

namespace qes::experiments {

struct AutocorrReport {
  std::size_t n = 0;
  std::vector<double> gamma_y, gamma_n;
  analysis::Autocorrelation x;  ///< Gamma_x = Gamma_y - Gamma_n
  double floor = 0.0;           ///< 1 / sqrt(n)
  double rho1 = 0.0;
  double max_abs_rho = 0.0;     ///< over 2 <= k <= report_lag
  std::size_t max_abs_lag = 0;
  analysis::NormalityResult normality{};  ///< rho(2..max_lag)
};

inline AutocorrReport autocorr_report(const std::vector<double>& in_pulse, const std::vector<double>& off_pulse,
                                      std::size_t max_lag, std::size_t report_lag) {
  AutocorrReport r;
  r.n = in_pulse.size();
  r.gamma_y = analysis::autocovariance(in_pulse, max_lag);
  r.gamma_n = analysis::autocovariance(off_pulse, max_lag);
  r.x = analysis::noise_subtracted_autocorrelation(in_pulse, off_pulse, max_lag);
  r.floor = r.x.noise_floor;
  if (r.x.rho.empty()) throw DegenerateInputError("off-pulse variance exceeds the in-pulse variance");
  r.rho1 = r.x.rho[1];
  for (std::size_t k = 2; k <= report_lag; ++k)
    if (std::abs(r.x.rho[k]) > r.max_abs_rho) {
      r.max_abs_rho = std::abs(r.x.rho[k]);
      r.max_abs_lag = k;
    }
  r.normality = analysis::dagostino_pearson(std::vector<double>(r.x.rho.begin() + 2, r.x.rho.end()));
  return r;
}

inline AutocorrReport run_autocorr(const ExperimentConfig& cfg, std::size_t workers = default_workers()) {
  cfg.validate();
  if (cfg.sim.pump2.mode != sim::PumpMode::gain_switched) throw ConfigError("autocorr needs pump2 gain-switched");
  PulseSpec ps = cfg.pulse;
  ps.phase_window.enabled = false;
  const auto s = run_pulses(cfg.sim, ps, cfg.autocorr.pulses, workers);
  return autocorr_report(s.in_pulse, s.off_pulse, cfg.autocorr.max_lag, cfg.autocorr.report_lag);
}

inline void write_autocorr(const fs::path& dir, const AutocorrReport& r, bool plot) {
  auto os = open_out(dir / "autocorr.csv");
  os << "lag,gamma_y,gamma_n,gamma_x,rho_x\n";
  for (std::size_t k = 0; k < r.x.gamma.size(); ++k)
    os << k << ',' << num(r.gamma_y[k]) << ',' << num(r.gamma_n[k]) << ',' << num(r.x.gamma[k]) << ','
       << num(r.x.rho[k]) << '\n';
  auto sm = open_out(dir / "stats_report.csv");
  sm << "n,noise_floor,rho1,max_abs_rho_k2_to_report_lag,max_abs_lag,threshold_4_over_sqrt_n,"
        "dagostino_k2,dagostino_p,normality_lags\n";
  sm << r.n << ',' << num(r.floor) << ',' << num(r.rho1) << ',' << num(r.max_abs_rho) << ',' << r.max_abs_lag << ','
     << num(4.0 * r.floor) << ',' << num(r.normality.k2) << ',' << num(r.normality.p_value) << ",2-"
     << r.x.rho.size() - 1 << '\n';
  if (plot)
    write_text(dir / "autocorr.gp",
               "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'lag'\nset ylabel 'rho'\n"
               "plot 'autocorr.csv' every ::2 using 1:5 with impulses title 'rho_x'\n");
}

}  // namespace qes::experiments
