#pragma once

#include <stdexcept>
#include <string>

namespace tstruct {

/// Base class for all workbench errors. Subclasses name the violated contract.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input validation failures (malformed JSON, bad shapes, unknown fields).
struct ValidationError : Error {
  using Error::Error;
};

// --- space model ---
struct CycleError : ValidationError {
  using ValidationError::ValidationError;
};
struct CodimError : ValidationError {
  using ValidationError::ValidationError;
};
struct DuplicatePoint : ValidationError {
  using ValidationError::ValidationError;
};
struct UnknownPoint : ValidationError {
  using ValidationError::ValidationError;
};
struct NotClosed : ValidationError {
  using ValidationError::ValidationError;
};
struct NotOpen : ValidationError {
  using ValidationError::ValidationError;
};
/// Two objects built over different space models were combined.
struct SpaceMismatch : ValidationError {
  using ValidationError::ValidationError;
};

// --- support calculus ---
struct MonotonicityError : ValidationError {
  using ValidationError::ValidationError;
};
struct NotDecreasing : ValidationError {
  using ValidationError::ValidationError;
};
struct NotBounded : ValidationError {
  using ValidationError::ValidationError;
};

// --- homological engine ---
/// An internal structural invariant failed (d^2 != 0, naturality, exactness).
struct InvariantError : Error {
  using Error::Error;
};
/// Injective resolution exceeded the #points hard cap; signals a bug.
struct ResolutionCapExceeded : InvariantError {
  using InvariantError::InvariantError;
};
/// A truncation/heart output failed its membership certificate re-check.
struct CertificateFailure : Error {
  using Error::Error;
};

}  // namespace tstruct
