#pragma once

#include <stdexcept>
#include <string>

namespace qsol {

// Invalid user-supplied configuration (CLI maps this to exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A caller broke an API precondition.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Propagation produced a non-finite or unphysical state (CLI exit code 3).
struct NumericalAbort : std::runtime_error {
  NumericalAbort(const std::string& msg, double t) : std::runtime_error(msg), t_fail(t) {}
  double t_fail;
};

}  // namespace qsol
