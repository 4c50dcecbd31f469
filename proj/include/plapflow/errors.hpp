#pragma once

#include <stdexcept>
#include <string>

namespace plapflow {

// Invalid user-supplied configuration (grid sizes, exponents, nonlinearity parameters).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative solver failed to meet its tolerance; carries the last residual seen.
struct SolverError : std::runtime_error {
  SolverError(const std::string& what, double last_residual_)
      : std::runtime_error(what), last_residual(last_residual_) {}
  double last_residual = 0.0;
};

// A computed result violates an internal invariant (energy increase, lost positivity, ...).
struct IntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace plapflow
