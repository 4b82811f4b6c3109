#pragma once

#include <stdexcept>
#include <string>

namespace pcone {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// det(I - Phi(T)) vanishes: the periodic problem has no Green's function.
class ResonanceError : public Error {
public:
    using Error::Error;
};

/// Evaluation too close to the singularity at x = 0.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// A structural hypothesis on g or e does not hold (e.g. g must be strictly
/// positive when e changes sign).
class HypothesisError : public Error {
public:
    using Error::Error;
};

/// Some Green's function is not positive on the grid, so no cone exists.
class PositivityAssumptionError : public Error {
public:
    using Error::Error;
};

class SingularJacobianError : public Error {
public:
    using Error::Error;
};

class NoConvergenceError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed input document; the message starts with the offending field path.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace pcone
