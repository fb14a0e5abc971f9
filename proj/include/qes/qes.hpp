#pragma once

#include "qes/analysis/autocorrelation.hpp"
#include "qes/analysis/circular.hpp"
#include "qes/analysis/distribution.hpp"
#include "qes/analysis/entropy.hpp"
#include "qes/analysis/locking.hpp"
#include "qes/analysis/normality.hpp"
#include "qes/analysis/phase_fit.hpp"
#include "qes/analysis/spectrum.hpp"
#include "qes/config.hpp"
#include "qes/core/error.hpp"
#include "qes/core/rng.hpp"
#include "qes/detection/amplifier.hpp"
#include "qes/detection/beat_frequency.hpp"
#include "qes/detection/chain.hpp"
#include "qes/detection/digitizer.hpp"
#include "qes/detection/filter.hpp"
#include "qes/detection/io.hpp"
#include "qes/detection/mmi.hpp"
#include "qes/detection/sampler.hpp"
#include "qes/detection/trace.hpp"
#include "qes/experiments/autocorr.hpp"
#include "qes/experiments/beat_traces.hpp"
#include "qes/experiments/generate.hpp"
#include "qes/experiments/histogram_stability.hpp"
#include "qes/experiments/locking_map.hpp"
#include "qes/extraction/bits.hpp"
#include "qes/extraction/io.hpp"
#include "qes/extraction/toeplitz.hpp"
#include "qes/pipeline.hpp"
#include "qes/sim/delay_line.hpp"
#include "qes/sim/lk.hpp"
#include "qes/sim/params.hpp"
#include "qes/sim/pump.hpp"
#include "qes/sim/simulate.hpp"
#include "qes/sim/trajectory_io.hpp"
