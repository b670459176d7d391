#pragma once

#include <stdexcept>
#include <string>

namespace dysa {

/// Base of every error raised by the library. The category decides the
/// process exit code used by the command-line tool.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration or invalid arguments (exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input data violates a documented invariant (exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

/// A foreign key in the session store points at nothing.
class ReferentialError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace dysa
