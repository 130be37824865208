// Error taxonomy. ConfigError maps to CLI exit code 2, NumericError to 3.
#pragma once

#include <stdexcept>
#include <string>

namespace starshape {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DirectionOutsideCone : NumericError {
  using NumericError::NumericError;
};
struct ToleranceNotReached : NumericError {
  using NumericError::NumericError;
};
struct LevelOutOfRange : NumericError {
  using NumericError::NumericError;
};
struct NoRoot : NumericError {
  using NumericError::NumericError;
};
struct HeavyTailUnsupported : NumericError {
  using NumericError::NumericError;
};
struct HeavyTailOnly : NumericError {
  using NumericError::NumericError;
};
struct DivergentIntegral : NumericError {
  using NumericError::NumericError;
};
struct InsufficientTail : NumericError {
  using NumericError::NumericError;
};
struct InsufficientSample : NumericError {
  using NumericError::NumericError;
};
struct RejectionStall : NumericError {
  using NumericError::NumericError;
};
struct DegenerateBox : NumericError {
  using NumericError::NumericError;
};

}  // namespace starshape
