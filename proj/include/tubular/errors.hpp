#pragma once

#include <stdexcept>
#include <string>

namespace tubular {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// geometry
struct NonUnitSpeed : Error { using Error::Error; };
struct DegenerateFrame : Error { using Error::Error; };
struct ZeroSpeed : Error { using Error::Error; };
struct SingularMetric : Error { using Error::Error; };
struct FrameMismatch : Error { using Error::Error; };

// framing
struct GridTooCoarse : Error { using Error::Error; };

// transverse
struct NotDegenerate : Error { using Error::Error; };
struct DegeneracySplit : Error { using Error::Error; };
struct ResolutionInsufficient : Error { using Error::Error; };

// effective
struct FormMismatch : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct NonHermitianResidual : Error { using Error::Error; };

// solver
struct UnsupportedDimension : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct SelfIntersection : Error { using Error::Error; };
struct TruncationInsufficient : Error { using Error::Error; };

// cli
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

}  // namespace tubular
