#pragma once

#include <stdexcept>
#include <string>

namespace otx {

// Base class for every typed error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct LabelOutOfRange : Error { using Error::Error; };
struct NonFiniteFeature : Error { using Error::Error; };

struct EmptyClass : Error { using Error::Error; };
struct BetaOutOfRange : Error { using Error::Error; };
struct NonPositiveExponent : Error { using Error::Error; };

struct ZeroNormVector : Error { using Error::Error; };

struct InfeasibleMarginals : Error { using Error::Error; };
struct NonFiniteCost : Error { using Error::Error; };
struct InstanceTooLarge : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };

struct UndefinedRow : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct AlphaOutOfRange : Error { using Error::Error; };

struct EmptySubset : Error { using Error::Error; };
struct UndefinedPrototype : Error { using Error::Error; };

struct EtaOutOfRange : Error { using Error::Error; };
struct DimensionTooSmall : Error { using Error::Error; };

struct MissingTruth : Error { using Error::Error; };
struct AllEmpty : Error { using Error::Error; };

struct IoError : Error { using Error::Error; };

}  // namespace otx
