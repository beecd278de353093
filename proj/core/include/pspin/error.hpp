#pragma once

#include <stdexcept>
#include <string>

namespace pspin {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or argument violates its documented constraint.
class InvalidArgument : public Error {
 public:
  InvalidArgument(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A point lies on (or too close to) a coordinate singularity of a chart.
class ChartSingularity : public Error {
 public:
  using Error::Error;
};

/// A diffusion matrix has an eigenvalue below the PSD tolerance.
class NotPositiveSemidefinite : public Error {
 public:
  NotPositiveSemidefinite(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// Stochastic sampling was requested where the Fokker-Planck condition fails.
class ConditionViolation : public Error {
 public:
  using Error::Error;
};

/// Numerical integration failed (non-finite state, step underflow, drift bound).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace pspin
