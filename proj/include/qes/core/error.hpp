#pragma once

#include <stdexcept>
#include <string>

namespace qes {

/// Invalid or inconsistent configuration. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite integrator state. Carries the offending variable and time.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::string variable, double time_ns)
      : std::runtime_error("numerical divergence in " + variable + " at t=" + std::to_string(time_ns) + " ns"),
        variable_(std::move(variable)),
        time_ns_(time_ns) {}

  const std::string& variable() const noexcept { return variable_; }
  double time_ns() const noexcept { return time_ns_; }

 private:
  std::string variable_;
  double time_ns_;
};

/// Input that makes a statistic undefined (zero variance, empty batch, too few points).
class DegenerateInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Measured min-entropy below the configured floor. Maps to CLI exit code 4.
class LowEntropyError : public std::runtime_error {
 public:
  LowEntropyError(double measured, double floor)
      : std::runtime_error("min-entropy " + std::to_string(measured) + " bit/sample below floor " +
                           std::to_string(floor) + " bit/sample; the source looks phase-locked or saturated"),
        measured_(measured),
        floor_(floor) {}

  double measured() const noexcept { return measured_; }
  double floor() const noexcept { return floor_; }

 private:
  double measured_;
  double floor_;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;
inline constexpr int divergence = 3;
inline constexpr int low_entropy = 4;
}  // namespace exit_code

}  // namespace qes
