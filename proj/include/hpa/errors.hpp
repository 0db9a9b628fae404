#pragma once

#include <stdexcept>
#include <string>

namespace hpa {

/// Bad input: violated precondition, malformed config, out-of-domain argument.
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A requested root does not exist (e.g. asking for a Hopf frequency in the
/// delay-independent stability regime).
struct no_root_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure: lost bracket, non-convergence, violated residual check.
struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Evaluation at (or too close to) a pole of a Gamma-kernel Laplace transform.
struct pole_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace hpa
