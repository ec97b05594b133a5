#pragma once

#include <stdexcept>
#include <string>

namespace meshcrit {

/// Argument outside the mathematical domain of an operation (u <= 0, broken triangle inequality).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Mesh or run configuration that is inconsistent with the requested mode.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Size guards (dense assembly, allocation).
class ResourceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// NaN/Inf produced inside an iterative solve.
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Root search started on an interval without a sign change.
class BracketError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace meshcrit
