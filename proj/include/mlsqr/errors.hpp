#pragma once

#include <stdexcept>
#include <string>

namespace mlsqr {

/// Caller passed a vector whose length does not match the operator/grid.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Cholesky hit a nonpositive pivot: the matrix is not positive definite.
class FactorizationError : public std::runtime_error {
 public:
  FactorizationError(const std::string& msg, std::size_t pivot_row)
      : std::runtime_error(msg), pivot_row_(pivot_row) {}
  std::size_t pivot_row() const noexcept { return pivot_row_; }

 private:
  std::size_t pivot_row_;
};

/// A Krylov recurrence produced an impossible quantity (e.g. a nonpositive
/// M-weighted square norm), signalling a non-SPD preconditioner map.
class BreakdownError : public std::runtime_error {
 public:
  BreakdownError(const std::string& msg, int iteration)
      : std::runtime_error(msg), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

/// Experiment configuration file violates the documented schema.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mlsqr
