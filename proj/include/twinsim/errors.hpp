#pragma once

#include <stdexcept>

namespace twinsim {

// Base class for all twinsim errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Generator validation.
struct NegativeOffDiagonal : Error { using Error::Error; };
struct RowSumNonzero : Error { using Error::Error; };
struct Reducible : Error { using Error::Error; };
struct SingularSystem : Error { using Error::Error; };

// Cost model.
struct WeightLengthMismatch : Error { using Error::Error; };
struct CosineZeroVector : Error { using Error::Error; };
struct EmptyTrace : Error { using Error::Error; };

// Simulation.
struct InvalidHorizon : Error { using Error::Error; };

// MDP.
struct DeltaNotZero : Error { using Error::Error; };
struct StateSpaceTooLarge : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct UnknownState : Error { using Error::Error; };
struct PeriodicOrReducibleChain : Error { using Error::Error; };

// Configuration.
struct ConfigParse : Error { using Error::Error; };
struct SchemaViolation : Error { using Error::Error; };

}  // namespace twinsim
