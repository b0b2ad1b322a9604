#pragma once

#include <stdexcept>
#include <string>

namespace mmr {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

// Raised when an interval intersection is empty beyond the numerical
// clamp tolerance. Theory guarantees non-empty intersections, so this
// signals an internal soundness bug rather than a valid outcome.
struct EmptyIntersection : Error {
    explicit EmptyIntersection(const std::string& msg) : Error(msg) {}
};

struct UnknownActivation : Error {
    explicit UnknownActivation(const std::string& msg) : Error(msg) {}
};

struct ShapeViolation : Error {
    explicit ShapeViolation(const std::string& msg) : Error(msg) {}
};

struct DerivativeMismatch : Error {
    explicit DerivativeMismatch(const std::string& msg) : Error(msg) {}
};

struct SchemaError : Error {
    explicit SchemaError(const std::string& msg) : Error(msg) {}
};

struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};

struct MissingPairs : Error {
    explicit MissingPairs(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace mmr
