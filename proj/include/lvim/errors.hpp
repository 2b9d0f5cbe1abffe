#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lvim {

enum class ErrorKind {
    invalid_argument,
    out_of_range,
    domain_violation,
    no_convergence,
    singular_basis,
};

const char* to_string(ErrorKind kind);

/// Base of every error raised by the library; `kind()` is what callers branch on.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(ErrorKind::invalid_argument, what) {}
};

class OutOfRange : public Error {
public:
    explicit OutOfRange(const std::string& what) : Error(ErrorKind::out_of_range, what) {}
};

class SingularBasis : public Error {
public:
    explicit SingularBasis(const std::string& what) : Error(ErrorKind::singular_basis, what) {}
};

class NoConvergence : public Error {
public:
    explicit NoConvergence(const std::string& what) : Error(ErrorKind::no_convergence, what) {}
};

/// Right-hand side left its domain (or returned non-finite values) at (t, state).
class DomainViolation : public Error {
public:
    DomainViolation(const std::string& what, double t, Eigen::VectorXd state)
        : Error(ErrorKind::domain_violation, what), t_(t), state_(std::move(state)) {}

    double t() const noexcept { return t_; }
    const Eigen::VectorXd& state() const noexcept { return state_; }

private:
    double t_;
    Eigen::VectorXd state_;
};

}  // namespace lvim
