#pragma once

#include <stdexcept>
#include <string>

namespace regcomply {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public DomainError {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : DomainError("dimension mismatch: expected " + std::to_string(expected) +
                    ", got " + std::to_string(got)) {}
};

// Cone generators are (numerically) coplanar.
class DegenerateCone : public Error {
 public:
  using Error::Error;
};

// Iterative routine failed to converge or produced a non-finite value.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A configured work budget (grid size, support enumeration, ...) was exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Invalid user configuration (CLI / config file).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace regcomply
