#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace safelight {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch between a tensor and what an operation expects.
class DimensionError : public Error {
 public:
  DimensionError(const std::string& what, std::size_t expected, std::size_t actual)
      : Error(what + ": expected " + std::to_string(expected) + ", got " + std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected() const { return expected_; }
  std::size_t actual() const { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

// Invalid configuration value. `field` is the dotted path of the offending key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : Error(field + ": " + message), field_(field) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Numerical precondition violated (non-finite input, unnormalized distribution, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace safelight
