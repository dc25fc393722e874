#pragma once

#include <stdexcept>
#include <string>

namespace cpsd {

/// A stochastic routine ran out of attempts. Carries the best attempt's
/// achieved error so callers can report how close it got.
class RetryExhaustedError : public std::runtime_error {
 public:
  RetryExhaustedError(const std::string& what, double best_error, int attempts)
      : std::runtime_error(what), best_error(best_error), attempts(attempts) {}

  double best_error;
  int attempts;
};

/// Iterative eigensolver failed to reach its convergence threshold.
class ConvergenceError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An internal consistency check failed (a quantity the construction
/// guarantees came out violated, usually a sign of mis-set tolerances).
class DiagnosticError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cpsd
