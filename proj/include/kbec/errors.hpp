#pragma once

#include <stdexcept>
#include <string>

namespace kbec {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Probability would leave the momentum ladder. Widen the ladder and retry.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative refinement (substep doubling) hit its limit before converging.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Degenerate input to a least-squares fit.
class FitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace kbec
