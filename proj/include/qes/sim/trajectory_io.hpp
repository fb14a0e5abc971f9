#pragma once

// Trajectory files.
//
// CSV: '#'-prefixed "key=value" metadata lines, then a header row
//   t_ns,re_e1,im_e1,re_e2,im_e2,n1,n2
// Binary (little-endian): "QESTRJ01", u64 rows, u64 cycles, u64 records_per_cycle,
//   u64 first_cycle, f64 t0, f64 dt_record, f64 t_mod, u64[cycles] cycle_starts,
//   then rows of 7 f64 in the CSV column order.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qes/core/error.hpp"
#include "qes/sim/simulate.hpp"

namespace qes::sim {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  char buf[256];
  os << "# format=qes-trajectory-csv-1\n";
  std::snprintf(buf, sizeof buf, "# t0_ns=%.17g\n# dt_record_ns=%.17g\n# t_mod_ns=%.17g\n", tr.t0, tr.dt_record,
                tr.t_mod);
  os << buf;
  os << "# records_per_cycle=" << tr.records_per_cycle << "\n# first_cycle=" << tr.first_cycle << "\n";
  os << "# cycle_starts=";
  for (std::size_t i = 0; i < tr.cycle_starts.size(); ++i) os << (i ? " " : "") << tr.cycle_starts[i];
  os << "\n# units: t in ns; fields and inversions dimensionless\n";
  os << "t_ns,re_e1,im_e1,re_e2,im_e2,n1,n2\n";
  for (std::size_t j = 0; j < tr.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", tr.time(j), tr.e1[j].real(),
                  tr.e1[j].imag(), tr.e2[j].real(), tr.e2[j].imag(), tr.n1[j], tr.n2[j]);
    os << buf;
  }
}

inline Trajectory read_trajectory_csv(std::istream& is) {
  Trajectory tr;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      const std::string val = line.substr(eq + 1);
      if (key == "t0_ns") tr.t0 = std::stod(val);
      else if (key == "dt_record_ns") tr.dt_record = std::stod(val);
      else if (key == "t_mod_ns") tr.t_mod = std::stod(val);
      else if (key == "records_per_cycle") tr.records_per_cycle = std::stoull(val);
      else if (key == "first_cycle") tr.first_cycle = std::stoull(val);
      else if (key == "cycle_starts") {
        std::istringstream ss(val);
        std::size_t v;
        while (ss >> v) tr.cycle_starts.push_back(v);
      }
      continue;
    }
    if (!header) {
      if (line.rfind("t_ns,", 0) != 0) throw ConfigError("trajectory CSV: missing header row");
      header = true;
      continue;
    }
    double v[7];
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2], &v[3], &v[4], &v[5], &v[6]) !=
        7)
      throw ConfigError("trajectory CSV: malformed row: " + line);
    tr.e1.emplace_back(v[1], v[2]);
    tr.e2.emplace_back(v[3], v[4]);
    tr.n1.push_back(v[5]);
    tr.n2.push_back(v[6]);
  }
  return tr;
}

namespace detail {
template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw ConfigError("binary file truncated");
  return v;
}
}  // namespace detail

inline constexpr char kTrajectoryMagic[8] = {'Q', 'E', 'S', 'T', 'R', 'J', '0', '1'};

inline void write_trajectory_binary(std::ostream& os, const Trajectory& tr) {
  os.write(kTrajectoryMagic, 8);
  detail::put<std::uint64_t>(os, tr.size());
  detail::put<std::uint64_t>(os, tr.cycle_starts.size());
  detail::put<std::uint64_t>(os, tr.records_per_cycle);
  detail::put<std::uint64_t>(os, tr.first_cycle);
  detail::put(os, tr.t0);
  detail::put(os, tr.dt_record);
  detail::put(os, tr.t_mod);
  for (auto c : tr.cycle_starts) detail::put<std::uint64_t>(os, c);
  for (std::size_t j = 0; j < tr.size(); ++j) {
    const double row[7] = {tr.time(j),         tr.e1[j].real(), tr.e1[j].imag(), tr.e2[j].real(),
                           tr.e2[j].imag(), tr.n1[j],        tr.n2[j]};
    os.write(reinterpret_cast<const char*>(row), sizeof row);
  }
}

inline Trajectory read_trajectory_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::string(magic, 8) != std::string(kTrajectoryMagic, 8))
    throw ConfigError("not a trajectory binary file");
  Trajectory tr;
  const auto rows = detail::get<std::uint64_t>(is);
  const auto cycles = detail::get<std::uint64_t>(is);
  tr.records_per_cycle = detail::get<std::uint64_t>(is);
  tr.first_cycle = detail::get<std::uint64_t>(is);
  tr.t0 = detail::get<double>(is);
  tr.dt_record = detail::get<double>(is);
  tr.t_mod = detail::get<double>(is);
  for (std::uint64_t i = 0; i < cycles; ++i) tr.cycle_starts.push_back(detail::get<std::uint64_t>(is));
  tr.reserve(rows);
  for (std::uint64_t j = 0; j < rows; ++j) {
    double row[7];
    if (!is.read(reinterpret_cast<char*>(row), sizeof row)) throw ConfigError("binary file truncated");
    tr.e1.emplace_back(row[1], row[2]);
    tr.e2.emplace_back(row[3], row[4]);
    tr.n1.push_back(row[5]);
    tr.n2.push_back(row[6]);
  }
  return tr;
}

}  // namespace qes::sim
