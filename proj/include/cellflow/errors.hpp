#pragma once

#include <stdexcept>
#include <string>

namespace cellflow {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input text (INP, CSV, JSON). Carries a 1-based line number
/// when one is known, 0 otherwise.
class ParseError : public Error {
  public:
    ParseError(const std::string& msg, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

/// A structurally invalid network or complex (duplicate ids, dangling
/// endpoints, disconnected passive graph, missing fixed-head node, ...).
class StructuralError : public Error {
  public:
    using Error::Error;
};

/// Invalid argument values (out-of-range sizes, negative tolerances, ...).
class ArgumentError : public Error {
  public:
    using Error::Error;
};

/// An iterative method failed to converge or a computation broke down.
class NumericalError : public Error {
  public:
    using Error::Error;
};

/// Signal recovery is not possible from the given samples (singular or
/// ill-conditioned interpolation operator).
class RecoveryError : public Error {
  public:
    using Error::Error;
};

/// Filesystem / stream failure.
class IoError : public Error {
  public:
    using Error::Error;
};

}  // namespace cellflow
