#pragma once

#include <stdexcept>
#include <string>

namespace floweval {

// Base class for every error this library raises on bad input or bad state.
// Callers that only want pass/fail can catch this one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// flow-io
struct BadMagic : Error { using Error::Error; };
struct Truncated : Error { using Error::Error; };
struct NonPositiveDims : Error { using Error::Error; };
struct NotPng : Error { using Error::Error; };
struct WrongBitDepth : Error { using Error::Error; };
struct WrongChannelCount : Error { using Error::Error; };
struct UnsupportedFormat : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// metrics
struct TooSmall : Error { using Error::Error; };
struct InsufficientSamples : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct EmptyRegion : Error { using Error::Error; };
struct BadRegion : Error { using Error::Error; };

// edge refinement
struct OutOfBounds : Error { using Error::Error; };

// viz
struct EmptyField : Error { using Error::Error; };

// harness
struct ManifestError : Error { using Error::Error; };
struct MissingSecondInput : Error { using Error::Error; };

}  // namespace floweval
