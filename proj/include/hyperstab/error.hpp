#pragma once

#include <stdexcept>
#include <string>

namespace hyperstab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates a structural or ordering invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Two objects that must share a grid (state, kernel, feedback) do not.
class GridMismatch : public Error {
public:
    using Error::Error;
};

/// Time step violates the stability or integrality requirement of a scheme.
class StepError : public Error {
public:
    using Error::Error;
};

}  // namespace hyperstab
