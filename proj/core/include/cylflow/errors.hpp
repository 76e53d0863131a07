#pragma once

#include <stdexcept>
#include <string>

namespace cylflow {

// Invalid parameters, specs or configuration values.
struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A brute-force oracle was asked to run above its enforced size cap.
struct OracleSizeError : std::runtime_error {
    explicit OracleSizeError(const std::string& msg) : std::runtime_error(msg) {}
};

// A capacity field does not cover a box required by an event evaluation.
struct CoverageError : std::runtime_error {
    explicit CoverageError(const std::string& msg) : std::runtime_error(msg) {}
};

// The distribution fails the supercriticality hypothesis F(0) < 1 - p_c.
struct HypothesisError : std::runtime_error {
    explicit HypothesisError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cylflow
