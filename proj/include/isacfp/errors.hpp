#pragma once

#include <stdexcept>
#include <string>

namespace isacfp {

/// Invalid scenario, solver or experiment configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown: failed factorization, NaN objective, runaway bisection (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, long iteration = -1)
        : std::runtime_error(iteration >= 0 ? what + " (iteration " + std::to_string(iteration) + ")"
                                            : what),
          iteration_(iteration) {}

    long iteration() const noexcept { return iteration_; }

private:
    long iteration_;
};

// Argument-domain violations use std::domain_error directly.

}  // namespace isacfp
