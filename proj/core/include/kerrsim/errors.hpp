#pragma once

#include <stdexcept>
#include <string>

namespace kerrsim {

/// Base of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent numerical input to a physics routine.
class PhysicsError : public Error {
 public:
  using Error::Error;
};

class NonPhysicalMoments : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

class DegenerateCenter : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

class NonHermitianInput : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

class NegativeSpectrum : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

/// Steady-state formulas evaluated past the parametric-instability threshold.
class InstabilityBound : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

/// Failure of a time integration; carries the last time reached successfully.
class IntegrationFailure : public Error {
 public:
  IntegrationFailure(const std::string& what, double last_good_t)
      : Error(what + " (last good t = " + std::to_string(last_good_t) + ")"),
        last_good_t_(last_good_t) {}

  double last_good_t() const noexcept { return last_good_t_; }

 private:
  double last_good_t_;
};

/// Probability leaked into the top of a truncated Fock basis.
class TruncationOverflow : public Error {
 public:
  TruncationOverflow(const std::string& what, double top_population)
      : Error(what), top_population_(top_population) {}

  double top_population() const noexcept { return top_population_; }

 private:
  double top_population_;
};

}  // namespace kerrsim
