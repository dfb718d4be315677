#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace radwave {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument or violated precondition (dimension, radius, resolution, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A sample or integrand evaluated to inf/nan.
class NonFiniteError : public Error {
public:
    NonFiniteError(const std::string& what, std::size_t node)
        : Error(what), node_(node) {}
    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

/// e^u beyond the double range. Carries the offending value and, once the
/// solver has annotated it, the time and radius where it happened.
class OverflowError : public Error {
public:
    explicit OverflowError(double u, std::optional<double> t = std::nullopt,
                           std::optional<double> r = std::nullopt);

    double value() const noexcept { return u_; }
    std::optional<double> time() const noexcept { return t_; }
    std::optional<double> radius() const noexcept { return r_; }

    OverflowError located(double t, double r) const { return OverflowError(u_, t, r); }

private:
    double u_;
    std::optional<double> t_;
    std::optional<double> r_;
};

class CflError : public Error {
public:
    using Error::Error;
};

/// The solution reached the Dirichlet wall (or would, given T).
class WallProximityError : public Error {
public:
    using Error::Error;
};

/// Data not resolved by the grid (concentration, Moser plateau, ...).
class ResolutionError : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace radwave
