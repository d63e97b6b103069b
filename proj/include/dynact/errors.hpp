#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dynact {

/// Base class for all errors raised by the toolkit. Each subclass maps to a
/// distinct CLI exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

/// Invalid configuration or invalid arguments to an operation.
class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Geometry that the discretization cannot handle (grid too coarse, degenerate
/// ghost-node layout, singular motion).
class GeometryError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class IoError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// Non-finite values produced by the explicit time stepper.
class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& what, std::size_t node, std::size_t step)
      : Error(what), node_(node), step_(step) {}
  int exit_code() const noexcept override { return 4; }
  std::size_t node() const noexcept { return node_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t node_;
  std::size_t step_;
};

/// Inputs that do not fit together (array shapes, file headers, grids).
class MismatchError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 5; }
};

}  // namespace dynact
