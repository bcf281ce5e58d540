#pragma once

#include <stdexcept>
#include <string>

namespace fhn {

/// Invalid or inconsistent configuration / input files. CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical abort during compute (NaN/Inf states, non-convergence,
/// scheme-contract violation). CLI exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace fhn
