#pragma once

#include <stdexcept>
#include <string>

namespace agg {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

// Zero difference vector, duplicate family members, zero-variance probe.
struct DegenerateError : Error {
  using Error::Error;
};

// Incompatible combination of otherwise valid options.
struct ConfigError : Error {
  using Error::Error;
};

struct CapacityError : Error {
  using Error::Error;
};

struct PsdError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace agg
