#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsqmc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad parameters (empty input, dimension mismatch, value out of range).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Cholesky hit a non-positive pivot. `index` is 1-based.
class NotPositiveDefinite : public Error {
public:
    explicit NotPositiveDefinite(std::size_t index)
        : Error("matrix is not positive definite: pivot " + std::to_string(index) + " is not positive"),
          index_(index) {}
    [[nodiscard]] std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class NotStationary : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

/// Second-stage program infeasible: relatively complete recourse (A1) does not hold.
class RecourseInfeasible : public Error {
public:
    using Error::Error;
};

/// Second-stage program unbounded: dual feasibility (A2) does not hold.
class RecourseUnbounded : public Error {
public:
    using Error::Error;
};

/// A derivative requested at a point where it does not exist (e.g. an (A5) violation).
class UndefinedDerivative : public Error {
public:
    using Error::Error;
};

class QuadratureNotConverged : public Error {
public:
    using Error::Error;
};

/// Variance too small to normalise sensitivity indices.
class ZeroVariance : public Error {
public:
    using Error::Error;
};

} // namespace tsqmc
