#pragma once

#include <stdexcept>
#include <string>

namespace deepens {

/// Base of every error raised by the library. The CLI maps these to exit status 1.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent caller input (shape mismatch, empty data, bad file contents).
class InputError : public Error {
public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// A Taylor coefficient required by a construction vanishes at the expansion point.
class DegenerateActivationError : public Error {
public:
  using Error::Error;
};

/// Requested structure exceeds a hard size guard.
class SizeError : public Error {
public:
  using Error::Error;
};

/// The operation is not defined for this activation kind.
class UnsupportedKindError : public Error {
public:
  using Error::Error;
};

/// Training or experiment execution failed.
class RunError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace deepens
