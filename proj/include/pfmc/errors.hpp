#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pfmc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments, incompatible representations, malformed configurations.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configured size cap (brute-force tuples, table entries, realizations) would be exceeded.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, underflowed normalizers, degenerate weights.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Requested operation is not defined for the given distribution family.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// Failure inside one replicate of a replicated experiment.
class ReplicateError : public Error {
 public:
  ReplicateError(std::size_t replicate, const std::string& what)
      : Error("replicate " + std::to_string(replicate) + ": " + what), replicate_(replicate) {}

  std::size_t replicate() const noexcept { return replicate_; }

 private:
  std::size_t replicate_;
};

}  // namespace pfmc
