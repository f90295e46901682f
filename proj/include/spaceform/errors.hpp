// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace spaceform {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Generation parameters that cannot produce a valid object.
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// Mesh connectivity is not a simplicial disk.
class TopologyError : public Error {
public:
    using Error::Error;
};

/// Cochain degree is invalid for the requested operation.
class DegreeError : public Error {
public:
    using Error::Error;
};

/// Geometry produced a non-positive Hodge-star weight.
class MeshQualityError : public Error {
public:
    using Error::Error;
};

/// A documented precondition on the input does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Serialized data refers to a different mesh, or is malformed.
class FormatError : public Error {
public:
    using Error::Error;
};

/// An iterative solve stopped before reaching its tolerance.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, double residual, int iterations)
        : Error(what), residual_(residual), iterations_(iterations)
    {
    }

    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

} // namespace spaceform
