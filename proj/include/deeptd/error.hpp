#pragma once

#include <stdexcept>
#include <string>

namespace deeptd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand sizes or shapes do not conform.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An argument is outside the domain of the operation.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// An experiment configuration is malformed or cannot be satisfied.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A statistic is undefined on the given sample (e.g. all-zero labels).
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// File system failure; the message names the path.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace deeptd
