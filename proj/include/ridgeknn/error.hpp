#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ridgeknn {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Line and column are 1-based; column 0 means the
/// whole line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " (line " + std::to_string(line) +
              (column ? ", column " + std::to_string(column) : std::string()) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument value does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The ridge system is numerically singular (typically lambda == 0 with a
/// rank-deficient Gram matrix).
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

/// Skewness of a distribution with zero variance is undefined.
class ZeroVarianceError : public Error {
 public:
  using Error::Error;
};

}  // namespace ridgeknn
