#pragma once

#include <stdexcept>
#include <string>

namespace sdfem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidSpec : public Error {
public:
    using Error::Error;
};

class OutOfDomain : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NoExactSolution : public Error {
public:
    NoExactSolution() : Error("problem carries no exact solution") {}
};

class MeshProblemMismatch : public Error {
public:
    using Error::Error;
};

class QuadratureOrderTooLow : public Error {
public:
    using Error::Error;
};

class UnknownRegion : public Error {
public:
    using Error::Error;
};

class NonpositiveError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Solver failures carry the kind so callers can decide whether the
/// returned iterate is still usable.
class SolverError : public Error {
public:
    enum class Kind { Breakdown, MaxIterationsExceeded, SingularFactor };

    SolverError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

} // namespace sdfem
