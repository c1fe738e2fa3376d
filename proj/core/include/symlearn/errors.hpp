#pragma once

#include <stdexcept>

namespace symlearn {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions do not line up; the message names both shapes.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Argument outside the operation's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed input file; the message names the byte offset where parsing failed.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure (missing file, failed write).
class IoError : public Error {
public:
    using Error::Error;
};

/// Invalid experiment or model configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// API misuse, e.g. a backward pass fed a cache from a mismatched forward.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Labels or data values out of range.
class DataError : public Error {
public:
    using Error::Error;
};

/// Non-finite values encountered where finite ones are required.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace symlearn
