#pragma once

#include <stdexcept>
#include <string>

namespace ordlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (ordinal expressions, set expressions, data files).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its precondition (e.g. alpha > beta).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A configurable resource guard tripped (overflow, recursion depth, memo size).
class GuardError : public Error {
 public:
  using Error::Error;
};

/// rho_F found no xi within the search bound.
class NotFoundWithinBound : public Error {
 public:
  using Error::Error;
};

/// A tree fragment lacks nodes or chains that a query needs.
class IncompleteData : public Error {
 public:
  using Error::Error;
};

/// The requested operation is not available for this input.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// A finiteness question could not be decided within the configured guards.
class Undecided : public Error {
 public:
  using Error::Error;
};

/// Invalid suite configuration or a referenced file that fails validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ordlab
