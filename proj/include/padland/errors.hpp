#pragma once

#include <stdexcept>
#include <string>

namespace padland {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inconsistent or invalid configuration (mismatched p/n, bad parameters).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A series or integral that does not converge.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The computation is refused because its correctness guarantee does not apply
/// (e.g. a symbol that is not increasing in the norm).
class RefusalError : public Error {
public:
    using Error::Error;
};

} // namespace padland
