#pragma once
#include <stdexcept>
#include <string>

namespace hran {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Dimension/shape contract violations. Messages name both shapes involved.
struct ShapeError : Error {
  using Error::Error;
};

// A primitive op produced NaN/Inf, or was fed non-finite input.
struct NonFiniteError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct CheckpointError : Error {
  using Error::Error;
};
struct ChecksumError : CheckpointError {
  using CheckpointError::CheckpointError;
};
struct VersionError : CheckpointError {
  using CheckpointError::CheckpointError;
};
struct NameSetError : CheckpointError {
  using CheckpointError::CheckpointError;
};

}  // namespace hran
