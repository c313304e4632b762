#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nematic {

/// Base of every error raised by the library. The message names the
/// violated contract.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values or mismatched field shapes.
class FieldError : public Error {
public:
  using Error::Error;
};

/// |d| = 1 violated beyond the configured tolerance.
class ConstraintError : public Error {
public:
  using Error::Error;
};

/// Time step above the admissible bound.
class StepSizeError : public Error {
public:
  StepSizeError(const std::string& what, double admissible)
      : Error(what), admissible_dt(admissible) {}
  double admissible_dt;
};

/// Zero effective density with a zero floor.
class VacuumError : public Error {
public:
  using Error::Error;
};

/// Non-finite or capped sup-norm: the run has left the resolvable regime.
class BlowupError : public Error {
public:
  BlowupError(const std::string& what, std::string field_name)
      : Error(what), field(std::move(field_name)) {}
  std::string field;
};

/// Iterative solve hit its cap.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double res, int iters)
      : Error(what), residual(res), iterations(iters) {}
  double residual;
  int iterations;
};

/// Initial data violating the compatibility condition in vacuum.
class CompatibilityError : public Error {
public:
  CompatibilityError(const std::string& what, std::vector<std::size_t> bad)
      : Error(what), cells(std::move(bad)) {}
  std::vector<std::size_t> cells;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

/// Two runs from identical inputs disagreed bitwise.
class DeterminismError : public Error {
public:
  using Error::Error;
};

/// A verification driver's contract or precondition failed.
class VerificationError : public Error {
public:
  using Error::Error;
};

} // namespace nematic
