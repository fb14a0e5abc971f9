#pragma once

// Photodiode -> RF amplifier -> scope front end, applied to one MMI port.

#include <cstddef>
#include <optional>
#include <vector>

#include "qes/core/rng.hpp"
#include "qes/detection/amplifier.hpp"
#include "qes/detection/digitizer.hpp"
#include "qes/detection/filter.hpp"
#include "qes/detection/mmi.hpp"
#include "qes/detection/trace.hpp"
#include "qes/sim/simulate.hpp"

namespace qes::detection {

struct ChainSpec {
  Port port = Port::plus;
  FilterSpec photodiode{FilterKind::lowpass, 40.0, 2};
  AmplifierSpec amplifier{30.0, 1.0};
  FilterSpec scope{FilterKind::lowpass, 20.0, 4};
  std::optional<FilterSpec> highpass;  ///< e.g. 30 MHz digital high-pass; off unless set
  DigitizerSpec digitizer{};

  void validate() const {
    photodiode.validate();
    amplifier.validate();
    scope.validate();
    if (highpass) highpass->validate();
    DigitizerSpec d = digitizer;
    d.v_min = 0.0;
    d.v_max = 1.0;
    d.validate();
  }

  friend bool operator==(const ChainSpec&, const ChainSpec&) = default;
};

/// Detected optical power of one port, on the trajectory's record grid.
inline AnalogTrace port_trace(const sim::Trajectory& tr, Port port) {
  AnalogTrace out{tr.t0, tr.dt_record, std::vector<double>(tr.size())};
  for (std::size_t j = 0; j < tr.size(); ++j) out.values[j] = port_signal(tr.e1[j], tr.e2[j], port);
  return out;
}

/// Analog scope signal at the digitizer clock (before quantization).
inline AnalogTrace detect(const AnalogTrace& optical, const ChainSpec& spec, NormalStream& amp_noise) {
  spec.validate();
  AnalogTrace x = apply_filter(optical, spec.photodiode);
  amplify_inplace(x, spec.amplifier, amp_noise);
  x = apply_filter(x, spec.scope);
  if (spec.highpass) x = apply_filter(x, *spec.highpass);
  return resample_linear(x, spec.digitizer.interval_ns());
}

}  // namespace qes::detection
