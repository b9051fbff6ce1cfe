#pragma once

#include <stdexcept>
#include <string>

namespace fpgm {

// Violated preconditions: dimension mismatches, out-of-range indices,
// invalid parameters.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Nonfinite intermediates, backtracking that never terminates, iterative
// procedures that stall.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DivergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Malformed input data (e.g. flat field not above dark field).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed configuration files or options.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fpgm
