#pragma once

#include <stdexcept>

namespace repdesc {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or contract-violating input (CLI exit code 2).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Degenerate computation or failed convergence (CLI exit code 3).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace repdesc
