#pragma once

#include <stdexcept>
#include <string>

namespace acdl {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor shapes or extents do not line up.
struct ShapeError : Error {
    using Error::Error;
};

// A contract violation that is not about shapes (bad mode, bad range, ...).
struct ValueError : Error {
    using Error::Error;
};

// NaN/Inf escaped a numeric kernel.
struct NumericError : Error {
    using Error::Error;
};

// Malformed file contents (PPM, checkpoint, config, ...).
struct FormatError : Error {
    using Error::Error;
};

// Filesystem-level failure.
struct IoError : Error {
    using Error::Error;
};

// User-facing misuse: unknown config key, missing prerequisite artifact.
// Commands map this to exit code 2; everything else maps to 1.
struct UsageError : Error {
    using Error::Error;
};

}  // namespace acdl
