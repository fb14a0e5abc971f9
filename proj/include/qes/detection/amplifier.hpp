#pragma once

#include <cmath>

#include "qes/core/error.hpp"
#include "qes/core/rng.hpp"
#include "qes/detection/trace.hpp"

namespace qes::detection {

struct AmplifierSpec {
  double gain_db = 30.0;
  double noise_sigma = 0.0;  ///< additive output noise, trace units after gain

  double linear_gain() const noexcept { return std::pow(10.0, gain_db / 20.0); }

  void validate() const {
    if (!std::isfinite(gain_db)) throw ConfigError("amplifier gain must be finite");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw ConfigError("amplifier noise_sigma must be >= 0");
  }

  friend bool operator==(const AmplifierSpec&, const AmplifierSpec&) = default;
};

inline void amplify_inplace(AnalogTrace& tr, const AmplifierSpec& spec, NormalStream& rng) {
  spec.validate();
  const double g = spec.linear_gain();
  if (spec.noise_sigma == 0.0) {
    for (double& v : tr.values) v *= g;
    return;
  }
  for (double& v : tr.values) v = v * g + spec.noise_sigma * rng();
}

inline AnalogTrace amplify(const AnalogTrace& in, const AmplifierSpec& spec, NormalStream& rng) {
  AnalogTrace out = in;
  amplify_inplace(out, spec, rng);
  return out;
}

}  // namespace qes::detection
