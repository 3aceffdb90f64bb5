#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>

namespace t2m {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Dimension of an argument does not match the declared shape.
struct ShapeError : Error {
    using Error::Error;
};

// A point lies outside the open set an object is defined on.
struct DomainError : Error {
    using Error::Error;
};

// A scalar parameter is out of range (nonpositive step, bad level index, ...).
struct ParameterError : Error {
    using Error::Error;
};

// Unknown chart id, chart mismatch, or a missing overlap.
struct ChartError : Error {
    using Error::Error;
};

// A matrix that must be invertible is numerically rank deficient.
struct SingularError : Error {
    using Error::Error;
};

// The Christoffel compatibility condition fails across a chart overlap.
struct IncompatibilityError : Error {
    IncompatibilityError(const std::string& msg, double residual)
        : Error(msg), worst_residual(residual) {}
    double worst_residual;
};

// Supplied fiber maps cannot come from a fiberwise-linear trivializing cover.
struct ExtractionError : Error {
    using Error::Error;
};

// A level family violates the tower compatibility relations.
struct ReconstructionError : Error {
    ReconstructionError(const std::string& msg, int j, int i)
        : Error(msg), level_j(j), level_i(i) {}
    int level_j;
    int level_i;
};

// Fixture configuration could not be parsed or is inconsistent.
struct ConfigError : Error {
    using Error::Error;
};

inline std::string format_point(const Vec& y) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(y[i]);
    }
    return s + ")";
}

}  // namespace t2m
