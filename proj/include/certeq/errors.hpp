#pragma once

#include <stdexcept>
#include <string>

namespace certeq {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative solver failed to reach its tolerance within the iteration cap.
struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& msg, int iterations, double residual)
        : std::runtime_error(msg), iterations(iterations), residual(residual) {}
    int iterations;
    double residual;
};

// A matrix required to be (Schur) stable has spectral radius >= 1.
struct StabilityError : std::runtime_error {
    StabilityError(const std::string& msg, double spectral_radius)
        : std::runtime_error(msg), spectral_radius(spectral_radius) {}
    double spectral_radius;
};

struct StabilizabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DetectabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ControllabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// State blew up during simulation.
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& msg, long step)
        : std::runtime_error(msg), step(step) {}
    long step;
};

}  // namespace certeq
