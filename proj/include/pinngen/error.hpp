#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pinngen {

// Caller broke a precondition (length mismatch, out-of-range order, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configuration that cannot produce a meaningful run.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Optimizer hit a non-finite loss or gradient.
class TrainingAbort : public std::runtime_error {
 public:
  TrainingAbort(const std::string& phase, std::int64_t iteration, const std::string& what)
      : std::runtime_error(phase + " iteration " + std::to_string(iteration) + ": " + what),
        phase_(phase),
        iteration_(iteration) {}

  const std::string& phase() const noexcept { return phase_; }
  std::int64_t iteration() const noexcept { return iteration_; }

 private:
  std::string phase_;
  std::int64_t iteration_;
};

// Results store could not be read or written.
class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pinngen
