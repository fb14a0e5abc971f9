#pragma once

// Extracted bitstream: raw packed bytes (LSB first) plus a key=value sidecar.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "qes/core/error.hpp"
#include "qes/extraction/toeplitz.hpp"

namespace qes::extraction {

struct ExtractionRecord {
  std::size_t n = 0;
  std::size_t m = 0;
  double epsilon = 0.0;
  double h_min_per_sample = 0.0;
  int bits_per_sample = 0;
  std::uint64_t seed_fingerprint = 0;
  std::size_t blocks = 0;
  std::size_t output_bits = 0;
};

inline void write_bits(std::ostream& os, const BitVector& bits) {
  const auto bytes = bits.to_bytes();
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline void write_record(std::ostream& os, const ExtractionRecord& r) {
  char buf[64];
  os << "format=qes-bits-1\n";
  os << "bit_order=lsb-first\n";
  os << "n=" << r.n << "\nm=" << r.m << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", r.epsilon);
  os << "epsilon=" << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", r.h_min_per_sample);
  os << "h_min_per_sample=" << buf << "\n";
  os << "bits_per_sample=" << r.bits_per_sample << "\n";
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(r.seed_fingerprint));
  os << "seed_fnv1a64=" << buf << "\n";
  os << "blocks=" << r.blocks << "\noutput_bits=" << r.output_bits << "\n";
}

}  // namespace qes::extraction
