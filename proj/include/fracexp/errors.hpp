#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracexp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition (bad Hurst index, bad interval, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// phi evaluated on its singular diagonal u == v.
class DiagonalSingularity : public DomainError {
public:
    using DomainError::DomainError;
};

/// Exact integer result does not fit the return type.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// Text grammar violation. `offset` is the 1-based byte column of the problem.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Expression cannot be evaluated (unbound variable, off-grid sample, ...).
class EvalError : public Error {
public:
    using Error::Error;
};

/// Operation not defined for the given expression node kind.
class UnsupportedNode : public Error {
public:
    using Error::Error;
};

/// Numerical engine failure (factorization, quadrature non-convergence, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace fracexp
