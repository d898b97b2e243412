// Error taxonomy shared by all modules.  Every failure mode is a typed
// exception; nothing is ever reported as a silent NaN.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ermakov {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed expression source or scenario config text.  `offset` is the byte
// offset of the offending token (expression errors) or 0 when not applicable.
struct ParseError : Error {
    std::size_t offset = 0;
    explicit ParseError(const std::string& msg) : Error(msg) {}
    ParseError(const std::string& msg, std::size_t off) : Error(msg), offset(off) {}
};

// Scenario config is syntactically fine but semantically unusable
// (missing key, bad value, contradictory system definition).
struct ConfigError : Error {
    using Error::Error;
};

// Expression evaluated outside its mathematical domain (log of a
// non-positive number, division by zero, fractional power of a negative).
struct DomainError : Error {
    using Error::Error;
};

// State hit a singular configuration of the equations of motion
// (x = 0, or y = 0 while the coupling F is not identically zero).
struct SingularError : Error {
    using Error::Error;
};

// Adaptive ODE integration failed: step underflow, NaN/Inf state, step
// budget exhausted.  `t` is where the integration gave up.
struct IntegrationError : Error {
    double t = 0.0;
    IntegrationError(const std::string& msg, double at) : Error(msg), t(at) {}
};

// Adaptive quadrature could not reach the requested tolerance.
struct QuadratureError : Error {
    using Error::Error;
};

// Root bracketing or refinement failed (e.g. time-map inversion target
// outside the attainable range).
struct RootFindError : Error {
    using Error::Error;
};

// A verification predicate failed (CLI maps this to its own exit code).
struct CheckError : Error {
    using Error::Error;
};

} // namespace ermakov
