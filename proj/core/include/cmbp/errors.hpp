#pragma once

#include <stdexcept>
#include <string>

namespace cmbp {

// Base class for all cmbp errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid parameters detected while building laws, controls, models or
// while parsing a config.
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// A population count (or an intermediate product/sum) would leave the
// signed 64-bit range. Simulation aborts rather than saturating.
struct OverflowError : Error {
  explicit OverflowError(const std::string& what) : Error(what) {}
};

// An iterative numerical routine failed to converge, or a numerical
// precondition (criticality, primitivity, ...) does not hold.
struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(what) {}
};

}  // namespace cmbp
