#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "opial/errors.hpp"

namespace opial {

/// Compact interval [a, b] with a < b, both finite.
struct Interval {
    double a;
    double b;

    Interval(double lo, double hi) : a(lo), b(hi) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
            throw DomainError("interval requires finite a < b");
    }

    double length() const noexcept { return b - a; }
    bool contains(double x) const noexcept { return x >= a && x <= b; }
    double midpoint() const noexcept { return 0.5 * (a + b); }
};

/// A real function together with the abscissae where it may fail to be smooth.
/// Quadrature never straddles a listed breakpoint.
struct PiecewiseSmoothFn {
    std::function<double(double)> fn;
    std::vector<double> breakpoints;

    PiecewiseSmoothFn() = default;
    PiecewiseSmoothFn(std::function<double(double)> f, std::vector<double> breaks = {})
        : fn(std::move(f)), breakpoints(std::move(breaks)) {}

    double operator()(double x) const { return fn(x); }
};

inline PiecewiseSmoothFn constant_fn(double c) {
    return PiecewiseSmoothFn([c](double) { return c; });
}

}  // namespace opial
