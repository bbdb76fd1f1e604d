#ifndef QTRAP_ERRORS_HPP
#define QTRAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qtrap {

/// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid or inconsistent user configuration (bad JSON, missing section,
/// nonpositive tolerance, ...). Maps to CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Base for faults raised while integrating an ODE. Maps to CLI exit code 3.
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// Initial values for the mode pair do not satisfy the canonical Wronskian.
class NonCanonicalInitialConditions : public IntegrationError {
public:
    using IntegrationError::IntegrationError;
};

/// |eps(t)| fell below the guard threshold; the complex width -i deps/eps
/// would blow up downstream.
class ZeroCrossing : public IntegrationError {
public:
    using IntegrationError::IntegrationError;
};

/// The adaptive integrator could not meet the requested tolerance.
class StepFailure : public IntegrationError {
public:
    using IntegrationError::IntegrationError;
};

/// Evaluation time outside the stored solution interval.
class OutOfInterval : public Error {
public:
    using Error::Error;
};

/// A quantity that must be real came back with a significant imaginary part;
/// signals a corrupted mode solution.
class ComplexLeak : public Error {
public:
    using Error::Error;
};

/// Ladder coefficients violate |mu|^2 - |nu|^2 = 1 beyond tolerance.
class NonCanonical : public Error {
public:
    using Error::Error;
};

/// Moment combination too small to form a ratio.
class DegenerateMoments : public Error {
public:
    using Error::Error;
};

/// Grid resolution insufficient for the requested evaluation.
class GridTooCoarse : public Error {
public:
    using Error::Error;
};

/// Operator parameters spread occupation past what the Fock truncation can
/// represent at the requested accuracy.
class TruncationTooSmall : public Error {
public:
    using Error::Error;
};

/// Matrix norm too large for the exponential at the requested tolerance.
class Overflow : public Error {
public:
    using Error::Error;
};

} // namespace qtrap

#endif
