#pragma once

#include <stdexcept>
#include <string>

namespace miura {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Spectrum touches the closed ray (-inf, 0] where Log and sqrt are cut.
class BranchCutViolation : public Error {
 public:
  BranchCutViolation(const std::string& what, double distance)
      : Error(what), distance_(distance) {}
  double distance() const noexcept { return distance_; }

 private:
  double distance_;
};

/// An eigenvalue sits too close to the quadrature contour, or the contour
/// crosses a singularity of the integrand.
class ContourViolation : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  SingularMatrix(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class Overflow : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// No shift in the kappa scan set keeps the spectrum off the branch cut.
class SelectionFailed : public Error {
 public:
  using Error::Error;
};

class DomainTooSmall : public Error {
 public:
  using Error::Error;
};

class BlowUp : public Error {
 public:
  BlowUp(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class StabilityViolation : public Error {
 public:
  using Error::Error;
};

class NearZeroPsi : public Error {
 public:
  NearZeroPsi(const std::string& what, std::size_t index, double x)
      : Error(what), index_(index), x_(x) {}
  std::size_t index() const noexcept { return index_; }
  double x() const noexcept { return x_; }

 private:
  std::size_t index_;
  double x_;
};

class NonPositivePsi : public Error {
 public:
  using Error::Error;
};

class InsufficientSnapshots : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IOError : public Error {
 public:
  using Error::Error;
};

}  // namespace miura
