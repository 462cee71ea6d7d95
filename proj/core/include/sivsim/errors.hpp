#pragma once

#include <stdexcept>
#include <string>

namespace sivsim {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operator or state shapes that do not match the Hilbert space they claim.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A density matrix violating trace, Hermiticity or positivity bounds.
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/// Parameter records outside their documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Adaptive integration failed (step underflow or trace drift).
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double time_ns)
      : Error(what + " at t = " + std::to_string(time_ns) + " ns"), time_ns_(time_ns) {}

  double time_ns() const noexcept { return time_ns_; }

 private:
  double time_ns_;
};

/// The Liouvillian kernel is not one-dimensional.
class SteadyStateError : public Error {
 public:
  SteadyStateError(const std::string& what, int degeneracy)
      : Error(what), degeneracy_(degeneracy) {}

  /// Detected kernel dimension (a lower bound on the sparse path; 0 when the residual check failed).
  int degeneracy() const noexcept { return degeneracy_; }

 private:
  int degeneracy_;
};

/// A detector or dipole channel carries no photon flux in the state considered.
class ZeroFluxError : public Error {
 public:
  ZeroFluxError() : Error("zero flux in channel") {}
  explicit ZeroFluxError(const std::string& channel)
      : Error("zero flux in channel '" + channel + "'") {}
};

/// Trajectory norm collapsed to zero (jump operators annihilate the state).
class NormUnderflowError : public Error {
 public:
  using Error::Error;
};

/// Not enough coincidences to normalize a correlation histogram.
class InsufficientStatisticsError : public Error {
 public:
  InsufficientStatisticsError() : Error("insufficient statistics") {}
  explicit InsufficientStatisticsError(const std::string& detail)
      : Error("insufficient statistics: " + detail) {}
};

}  // namespace sivsim
