#pragma once

// Small helpers shared by the experiment writers. Numbers are printed with a
// fixed format so reruns produce byte-identical files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "qes/core/error.hpp"

namespace qes::experiments {

namespace fs = std::filesystem;

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::ofstream open_out(const fs::path& p, bool binary = false) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, binary ? std::ios::binary : std::ios::out);
  if (!os) throw ConfigError("cannot write " + p.string());
  return os;
}

inline void write_text(const fs::path& p, const std::string& s) { open_out(p) << s; }

}  // namespace qes::experiments
