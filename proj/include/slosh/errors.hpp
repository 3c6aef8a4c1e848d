#pragma once

#include <stdexcept>
#include <string>

namespace slosh {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input and configuration problems.
class InvalidSpec : public Error { using Error::Error; };
class InvalidArgument : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };

// Mesh problems.
class DegenerateMesh : public Error { using Error::Error; };
class DegenerateElement : public Error { using Error::Error; };

// Numerical failures.
class SolverFailure : public Error { using Error::Error; };
class SingularOperator : public Error { using Error::Error; };
class IncompatibleData : public Error { using Error::Error; };
class ConvergenceFailure : public Error { using Error::Error; };
class NotSimple : public Error { using Error::Error; };
class ModeTrackingFailure : public Error { using Error::Error; };

/// A discrete identity that should hold for exact eigenpairs was violated.
class IdentityViolation : public Error {
 public:
  IdentityViolation(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace slosh
