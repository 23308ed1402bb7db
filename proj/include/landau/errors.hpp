#pragma once

#include <stdexcept>
#include <string>

namespace landau {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedDimensionError : std::invalid_argument {
    explicit UnsupportedDimensionError(int d)
        : std::invalid_argument("unsupported dimension d=" + std::to_string(d) +
                                " (expected 2 or 3)") {}
};

struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Initial law fails the non-degeneracy check (empirical support embedded in a line).
struct DegenerateInitialLawError : std::runtime_error {
    DegenerateInitialLawError(double lambda_min, const std::string& direction)
        : std::runtime_error("degenerate initial law: empirical lambda_min=" +
                             std::to_string(lambda_min) +
                             " along direction " + direction),
          lambda_min(lambda_min) {}
    double lambda_min;
};

struct NumericalBlowupError : std::runtime_error {
    NumericalBlowupError(long step, double t)
        : std::runtime_error("numerical blowup (NaN/Inf) at step " +
                             std::to_string(step) + ", t=" + std::to_string(t)),
          step(step), t(t) {}
    long step;
    double t;
};

struct NonPsdCovarianceError : std::runtime_error {
    explicit NonPsdCovarianceError(double eig)
        : std::runtime_error("per-particle covariance has eigenvalue " +
                             std::to_string(eig) + " below -1e-8*trace") {}
};

}  // namespace landau
