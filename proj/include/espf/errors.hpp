#pragma once

#include <stdexcept>
#include <string>

namespace espf {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Points do not affinely span the ambient space.
class DegenerateCloud : public Error {
public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
  using Error::Error;
};

/// Every conjunctive-update value underflowed: total evidential conflict.
class AllZero : public Error {
public:
  using Error::Error;
};

/// Every level of a cut-volume profile is degenerate (H_pi would be -inf).
class AllDegenerate : public Error {
public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
public:
  using Error::Error;
};

class NoNonSurvivor : public Error {
public:
  using Error::Error;
};

class UnsupportedLevel : public Error {
public:
  using Error::Error;
};

class InsufficientLevels : public Error {
public:
  using Error::Error;
};

class SubsurfaceTrajectory : public Error {
public:
  using Error::Error;
};

class NotVisible : public Error {
public:
  using Error::Error;
};

class SingularInnovation : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Runtime filter failure that survived the recovery path.
class FilterFailure : public Error {
public:
  using Error::Error;
};

/// A debug-mode admissibility audit found a violated condition.
class AdmissibilityViolation : public Error {
public:
  using Error::Error;
};

}  // namespace espf
