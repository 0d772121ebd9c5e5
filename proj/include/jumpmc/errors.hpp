#pragma once

#include <stdexcept>
#include <string>

namespace jumpmc {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or incompatible sampler/model combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A state that violates the model's validity rules.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The process has zero total event rate and cannot leave its state.
class AbsorbingStateError : public Error {
 public:
  using Error::Error;
};

/// dCS velocity with Delta(x, v) = 0: neither direction of v can move.
class DegenerateVelocityError : public AbsorbingStateError {
 public:
  using AbsorbingStateError::AbsorbingStateError;
};

/// Incremental caches disagree with from-scratch recomputation.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed the requested size cap.
class SizeOverflowError : public Error {
 public:
  using Error::Error;
};

}  // namespace jumpmc
