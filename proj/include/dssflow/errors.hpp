#pragma once

#include <stdexcept>
#include <string>

namespace dssflow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input: out-of-range parameter, malformed config, unknown name.
struct ConfigError : Error {
    using Error::Error;
};

struct UsageError : Error {
    using Error::Error;
};

// Geometry violated: support touches a boundary, box too small for R0, etc.
struct GeometryError : Error {
    using Error::Error;
};

// An iteration failed to reach its tolerance; carries the best achieved value.
struct ConvergenceError : Error {
    double achieved;
    ConvergenceError(const std::string& msg, double achieved_)
        : Error(msg), achieved(achieved_) {}
};

// Time integration produced NaN/overflow.
struct DivergenceError : Error {
    using Error::Error;
};

// Stored artifact does not match its manifest hashes.
struct IntegrityError : Error {
    using Error::Error;
};

// Evaluation requested outside the certified region.
struct ExtrapolationError : Error {
    using Error::Error;
};

}  // namespace dssflow
