#pragma once

#include <stdexcept>
#include <string>

namespace sflob {

/// Base class for all model/solver errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonPositiveParameter : Error {
    explicit NonPositiveParameter(const std::string& name)
        : Error("non-positive parameter: " + name), parameter(name) {}
    std::string parameter;
};

struct EmptySide : Error {
    explicit EmptySide(const std::string& side)
        : Error("book side has no orders: " + side) {}
};

struct WindowViolation : Error {
    WindowViolation(long q, long cutoff)
        : Error("relative level " + std::to_string(q) +
                " outside submission window [1," + std::to_string(cutoff) + "]") {}
};

struct EmptyQueue : Error {
    explicit EmptyQueue(long level)
        : Error("no order to remove at level " + std::to_string(level)) {}
};

/// Removal would leave one side of the book with zero orders anywhere.
struct SideWouldEmpty : Error {
    explicit SideWouldEmpty(double at_time)
        : Error("removal would empty a book side at t=" + std::to_string(at_time)),
          time(at_time) {}
    double time;
};

struct InsufficientSamples : Error {
    using Error::Error;
};

struct NonlinearMSD : Error {
    explicit NonlinearMSD(double r2)
        : Error("MSD fit is not linear (R^2=" + std::to_string(r2) + ")"),
          r_squared(r2) {}
    double r_squared;
};

struct DomainTooSmall : Error {
    using Error::Error;
};

struct NoConvergence : Error {
    NoConvergence(int iters, double residual)
        : Error("no convergence after " + std::to_string(iters) +
                " iterations, residual " + std::to_string(residual)),
          iterations(iters), final_residual(residual) {}
    int iterations;
    double final_residual;
};

struct NoBracket : Error {
    using Error::Error;
};

struct GridMismatch : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace sflob
