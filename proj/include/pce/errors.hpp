#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pce {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An integer quantity (basis cardinality, grid size) does not fit in 64 bits.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// The requested sampling strategy cannot handle the basis families.
class UnsupportedStrategyError : public Error {
 public:
  using Error::Error;
};

/// Randomized quadrature asked for more points than the tensor grid holds.
class InsufficientGridError : public Error {
 public:
  using Error::Error;
};

/// A rank-one update whose denominator 1 +/- a'A^{-1}a vanishes.
class SingularUpdateError : public Error {
 public:
  using Error::Error;
};

/// Greedy design construction found no nonsingular augmentation.
class DesignConstructionError : public Error {
 public:
  DesignConstructionError(std::size_t step, const std::string& what)
      : Error("design construction failed at step " + std::to_string(step) + ": " + what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Least-squares matrix has numerical rank below the number of unknowns.
class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(std::ptrdiff_t rank, std::ptrdiff_t columns)
      : Error("rank-deficient least-squares problem: numerical rank " + std::to_string(rank) + " < " +
              std::to_string(columns)),
        rank_(rank) {}
  std::ptrdiff_t rank() const noexcept { return rank_; }

 private:
  std::ptrdiff_t rank_;
};

/// A ratio whose denominator is zero (e.g. relative error against a zero vector).
class UndefinedError : public Error {
 public:
  using Error::Error;
};

/// A dense linear-algebra kernel failed to converge or produced non-finite output.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The battery voltage never fell below the cut-off within the integration horizon.
class HorizonExceededError : public Error {
 public:
  explicit HorizonExceededError(double horizon)
      : Error("terminal voltage did not reach cut-off within horizon of " + std::to_string(horizon) + " s"),
        horizon_(horizon) {}
  double horizon() const noexcept { return horizon_; }

 private:
  double horizon_;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pce
