#pragma once

#include <stdexcept>
#include <string>

namespace qprobe {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (unphysical state, negative time, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed: overflow, non-convergence, unstable poles.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// An experiment configuration is malformed or inconsistent.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace qprobe
