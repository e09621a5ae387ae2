#pragma once

#include <stdexcept>
#include <string>

namespace ck {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A desk-scale limit was exceeded. Raised instead of truncating results.
class ResourceGuard : public Error {
 public:
  using Error::Error;
};

// Solver failures.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Iterates left the divergence radius: the target lies outside the open
/// image of the gradient map.
class Divergence : public SolverError {
 public:
  using SolverError::SolverError;
};

class SingularHessian : public SolverError {
 public:
  using SolverError::SolverError;
};

class MaxIterations : public SolverError {
 public:
  using SolverError::SolverError;
};

class TargetOnBoundaryOrOutside : public SolverError {
 public:
  using SolverError::SolverError;
};

class DegenerateSupport : public SolverError {
 public:
  using SolverError::SolverError;
};

class NonConvergent : public SolverError {
 public:
  using SolverError::SolverError;
};

class FullDimensional : public Error {
 public:
  using Error::Error;
};

class DegeneratePolytope : public Error {
 public:
  using Error::Error;
};

class NotSkewAdjoint : public Error {
 public:
  using Error::Error;
};

class UnboundedGradientImage : public Error {
 public:
  using Error::Error;
};

/// Short name of the most derived error class, for reports.
inline const char* error_kind(const Error& e) {
  if (dynamic_cast<const Divergence*>(&e)) return "Divergence";
  if (dynamic_cast<const SingularHessian*>(&e)) return "SingularHessian";
  if (dynamic_cast<const MaxIterations*>(&e)) return "MaxIterations";
  if (dynamic_cast<const TargetOnBoundaryOrOutside*>(&e)) return "TargetOnBoundaryOrOutside";
  if (dynamic_cast<const DegenerateSupport*>(&e)) return "DegenerateSupport";
  if (dynamic_cast<const NonConvergent*>(&e)) return "NonConvergent";
  if (dynamic_cast<const SolverError*>(&e)) return "SolverError";
  if (dynamic_cast<const DimensionMismatch*>(&e)) return "DimensionMismatch";
  if (dynamic_cast<const InvalidArgument*>(&e)) return "InvalidArgument";
  if (dynamic_cast<const ResourceGuard*>(&e)) return "ResourceGuard";
  if (dynamic_cast<const FullDimensional*>(&e)) return "FullDimensional";
  if (dynamic_cast<const DegeneratePolytope*>(&e)) return "DegeneratePolytope";
  if (dynamic_cast<const NotSkewAdjoint*>(&e)) return "NotSkewAdjoint";
  if (dynamic_cast<const UnboundedGradientImage*>(&e)) return "UnboundedGradientImage";
  return "Error";
}

}  // namespace ck
