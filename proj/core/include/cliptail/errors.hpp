#pragma once

#include <stdexcept>
#include <string>

namespace cliptail {

/// Bad argument to a library operation (dimension mismatch, out-of-range
/// parameter, non-finite input).
struct InputError : std::invalid_argument {
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed experiment configuration. The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numeric routine failed to meet its tolerance. Carries the best estimate
/// reached so callers can decide whether to proceed.
struct NumericError : std::runtime_error {
    NumericError(const std::string& what, double best)
        : std::runtime_error(what), best_estimate(best) {}
    double best_estimate;
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cliptail
