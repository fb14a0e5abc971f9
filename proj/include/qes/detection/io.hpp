#pragma once

// Sample batch CSV and packed code files.
//
// Code binary (little-endian): "QESCODE1", u32 bits, u64 count, then count
// codes as u8 (bits <= 8) or u16.

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "qes/core/error.hpp"
#include "qes/detection/sampler.hpp"

namespace qes::detection {

inline void write_batch_csv(std::ostream& os, const SampleBatch& b) {
  const bool has_codes = b.codes.size() == b.values.size();
  const bool has_phase = b.phases.size() == b.values.size();
  os << "cycle_index,analog_value";
  if (has_codes) os << ",code";
  if (has_phase) os << ",phase_rad";
  os << "\n";
  char buf[64];
  for (std::size_t i = 0; i < b.values.size(); ++i) {
    os << (b.cycle.size() == b.values.size() ? b.cycle[i] : i);
    std::snprintf(buf, sizeof buf, ",%.17g", b.values[i]);
    os << buf;
    if (has_codes) os << "," << b.codes[i];
    if (has_phase) {
      std::snprintf(buf, sizeof buf, ",%.17g", b.phases[i]);
      os << buf;
    }
    os << "\n";
  }
}

inline constexpr char kCodeMagic[8] = {'Q', 'E', 'S', 'C', 'O', 'D', 'E', '1'};

inline void write_codes_binary(std::ostream& os, const std::vector<std::uint16_t>& codes, int bits) {
  if (bits < 1 || bits > 16) throw ConfigError("code width must be in [1, 16]");
  os.write(kCodeMagic, 8);
  const auto b = static_cast<std::uint32_t>(bits);
  const auto n = static_cast<std::uint64_t>(codes.size());
  os.write(reinterpret_cast<const char*>(&b), sizeof b);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  for (auto c : codes) {
    if (bits <= 8) {
      const auto v = static_cast<std::uint8_t>(c);
      os.write(reinterpret_cast<const char*>(&v), 1);
    } else {
      os.write(reinterpret_cast<const char*>(&c), 2);
    }
  }
}

struct CodeFile {
  int bits = 8;
  std::vector<std::uint16_t> codes;
};

inline CodeFile read_codes_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::string(magic, 8) != std::string(kCodeMagic, 8))
    throw ConfigError("not a code binary file");
  std::uint32_t b = 0;
  std::uint64_t n = 0;
  if (!is.read(reinterpret_cast<char*>(&b), sizeof b) || !is.read(reinterpret_cast<char*>(&n), sizeof n))
    throw ConfigError("code file truncated");
  if (b < 1 || b > 16) throw ConfigError("code file: bad width");
  CodeFile f{static_cast<int>(b), std::vector<std::uint16_t>(n)};
  for (std::uint64_t i = 0; i < n; ++i) {
    if (b <= 8) {
      std::uint8_t v;
      if (!is.read(reinterpret_cast<char*>(&v), 1)) throw ConfigError("code file truncated");
      f.codes[i] = v;
    } else {
      if (!is.read(reinterpret_cast<char*>(&f.codes[i]), 2)) throw ConfigError("code file truncated");
    }
  }
  return f;
}

}  // namespace qes::detection
