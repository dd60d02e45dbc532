#pragma once

#include <stdexcept>
#include <string>

namespace spheremix {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A construction would exceed a configured size cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature did not reach its self-consistency target.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The sampling net of a block does not bracket the requested value.
class BracketingFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A target function failed the probability-density check.
class NonDensity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (JSON/CSV).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spheremix
