#pragma once

#include <stdexcept>
#include <string>

namespace parlens {

/// Bad input: a documented precondition does not hold. The CLI maps these
/// to exit code 1; everything else that escapes maps to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// layout
struct RaggedGrid : ValidationError {
  using ValidationError::ValidationError;
};
struct UnknownCell : ValidationError {
  using ValidationError::ValidationError;
};
struct NoFloor : ValidationError {
  using ValidationError::ValidationError;
};
struct UnreachableWorkstation : ValidationError {
  using ValidationError::ValidationError;
};

// graph
struct Unreachable : ValidationError {
  using ValidationError::ValidationError;
};

// task model
struct EmptyRecipe : ValidationError {
  using ValidationError::ValidationError;
};
struct InvalidTeamSize : ValidationError {
  using ValidationError::ValidationError;
};
struct DomainError : ValidationError {
  using ValidationError::ValidationError;
};

// specialization
struct EmptyTrajectory : ValidationError {
  using ValidationError::ValidationError;
};
struct InvalidDiscount : ValidationError {
  using ValidationError::ValidationError;
};
struct AlphabetMismatch : ValidationError {
  using ValidationError::ValidationError;
};
struct TooFewDistributions : ValidationError {
  using ValidationError::ValidationError;
};
struct ZeroCounts : ValidationError {
  using ValidationError::ValidationError;
};

// simulator
struct InvalidAssignment : ValidationError {
  using ValidationError::ValidationError;
};
struct Deadlock : std::runtime_error {
  explicit Deadlock(const std::string& msg) : std::runtime_error(msg) {}
};

// learners
struct StateSpaceTooLarge : ValidationError {
  using ValidationError::ValidationError;
};

// stats / io
struct DegenerateInput : ValidationError {
  using ValidationError::ValidationError;
};
struct SingleClass : ValidationError {
  using ValidationError::ValidationError;
};
struct DimensionMismatch : ValidationError {
  using ValidationError::ValidationError;
};
struct MissingColumn : ValidationError {
  using ValidationError::ValidationError;
};

}  // namespace parlens
