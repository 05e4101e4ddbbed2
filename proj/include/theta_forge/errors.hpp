#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace theta_forge {

/// Base of every error raised by the library.
class ThetaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public ThetaError {
 public:
  using ThetaError::ThetaError;
};

/// The requested digits cannot be delivered (nome too close to 1, term cap hit).
class PrecisionUnreachable : public ThetaError {
 public:
  using ThetaError::ThetaError;
};

/// Malformed command line, basis, or catalog reference.
class UsageError : public ThetaError {
 public:
  using ThetaError::ThetaError;
};

/// A derivation step or transfer failed its numeric certification.
class InconsistencyError : public ThetaError {
 public:
  using ThetaError::ThetaError;
};

/// Sample matrix could not be resolved at the working precision.
class IllConditioned : public ThetaError {
 public:
  using ThetaError::ThetaError;
};

class ParseError : public ThetaError {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : ThetaError(message + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace theta_forge
