#pragma once

#include <cstdint>
#include <vector>

#include "opial/interval.hpp"
#include "opial/polynomial.hpp"

namespace opial {

/// How f' is valued on the breakpoint set, where the derivative does not exist.
enum class BreakpointRule { right_limit, left_limit };

/// Absolutely continuous function on [a, b], stored through its derivative:
/// f(x) = f(a) + integral_a^x f'(t) dt, f' piecewise polynomial of degree <= 3.
///
/// f' is undefined at interior knots. Measures with atoms there still integrate f', so
/// the value used at each interior knot is stored explicitly.
class ACFunction {
public:
    static constexpr std::size_t kMaxDegree = 3;

    ACFunction(PiecewisePolynomial derivative, double value_at_a,
               BreakpointRule rule = BreakpointRule::right_limit);
    /// `breakpoint_values` gives f' at each interior knot, in order.
    ACFunction(PiecewisePolynomial derivative, double value_at_a,
               std::vector<double> breakpoint_values);

    Interval interval() const { return derivative_.interval(); }
    double value_at_a() const noexcept { return value_at_a_; }
    const PiecewisePolynomial& derivative_poly() const noexcept { return derivative_; }
    const std::vector<double>& breakpoint_values() const noexcept { return breakpoint_values_; }
    /// Interior knots of f' (the set where f' is not defined).
    std::vector<double> breakpoints() const { return derivative_.interior_knots(); }

    /// f(x) in closed form. Throws DomainError outside [a, b].
    double operator()(double x) const;
    /// f'(x), using the stored value at interior knots.
    double derivative(double x) const;

    /// Same f with f' re-valued on the breakpoint set.
    ACFunction with_breakpoint_values(std::vector<double> values) const;
    ACFunction with_breakpoint_rule(BreakpointRule rule) const;

    PiecewiseSmoothFn value_fn() const;
    PiecewiseSmoothFn derivative_fn() const;

private:
    PiecewisePolynomial derivative_;
    double value_at_a_;
    std::vector<double> breakpoint_values_;
};

inline double eval(const ACFunction& f, double x) { return f(x); }

/// Deterministic family of AC functions whose derivatives are piecewise linear or
/// quadratic with at most `piece_budget` pieces and breakpoints inside (a, b).
/// Coefficients are bounded so every norm used by the verifiers is finite.
std::vector<ACFunction> random_ac_family(Interval interval, std::uint64_t seed, int count,
                                         bool zero_at_a, int piece_budget);

/// Uniform double in [0, 1) from the top 53 bits; platform independent.
double unit_uniform(std::uint64_t bits);

}  // namespace opial
