#pragma once

#include <stdexcept>
#include <string>

namespace opial {

/// Argument outside the mathematical domain of an operation (p < 1, x <= 0 for Gamma, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A sampled integrand produced a non-finite value.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, double abscissa)
        : std::runtime_error(what), abscissa_(abscissa) {}
    double abscissa() const noexcept { return abscissa_; }

private:
    double abscissa_;
};

/// The integral does not exist (non-integrable endpoint power, divergent kernel).
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive refinement ran out of depth or cells before meeting the tolerance.
class ConvergenceFailure : public std::runtime_error {
public:
    ConvergenceFailure(const std::string& what, double best_estimate, double error_estimate)
        : std::runtime_error(what), best_(best_estimate), error_(error_estimate) {}
    double best_estimate() const noexcept { return best_; }
    double error_estimate() const noexcept { return error_; }

private:
    double best_;
    double error_;
};

/// Caller violated a documented precondition (e.g. a measure charging the right endpoint).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A hypothesis of an inequality fails, so the inequality asserts nothing for this instance.
class HypothesisFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An object invariant was found broken at evaluation time (e.g. g'(s) <= 0).
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace opial
