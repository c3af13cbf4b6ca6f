// Exception taxonomy shared by every module.
//
// All failures that a caller can reasonably recover from are typed; anything
// else surfaces as std::invalid_argument / std::logic_error from the callee.

#pragma once

#include <stdexcept>
#include <string>

namespace clocksim {

// Argument outside the mathematical domain of an operation (e.g. evaluating a
// Laplace exponent outside its finiteness interval, log-gamma at x <= 0).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Two evaluation routes that must agree (closed form vs finite difference,
// quadrature vs closed form) disagree beyond the pinned tolerance.
class InconsistencyError : public std::runtime_error {
 public:
  explicit InconsistencyError(const std::string& what) : std::runtime_error(what) {}
};

// Lazy path extension hit its configured cap before reaching the requested
// exponential-functional level.
class ExtensionLimitError : public std::runtime_error {
 public:
  explicit ExtensionLimitError(const std::string& what) : std::runtime_error(what) {}
};

// Importance-resampling effective sample size fell below the safety floor.
class ResamplingError : public std::runtime_error {
 public:
  explicit ResamplingError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical differentiation failed its internal step-halving agreement check.
class PrecisionError : public std::runtime_error {
 public:
  explicit PrecisionError(const std::string& what) : std::runtime_error(what) {}
};

// A verification sweep found a violation of a claimed inequality.
class VerificationError : public std::runtime_error {
 public:
  explicit VerificationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace clocksim
