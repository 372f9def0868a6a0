#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "opial/interval.hpp"

namespace opial::quad {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

struct AdaptiveOptions {
    double tol = 1e-10;          ///< relative to max(|value|, integral of |integrand|)
    int max_depth = 40;          ///< bisections of any initial cell
    std::size_t max_cells = 400000;
};

/// Geometric ratio of successive cells of the graded mesh.
inline constexpr double kGradingRatio = 0.15;

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [lo, hi]. Initial cells are
/// cut at every breakpoint strictly inside (lo, hi).
/// Throws EvaluationError on a non-finite sample and ConvergenceFailure when a cell
/// would exceed max_depth or the cell budget runs out.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                              std::span<const double> breakpoints = {},
                              const AdaptiveOptions& opts = {});

enum class SingularEnd { left, right };

/// Integral of smooth(s) * |s - e|^exponent [* substitution_weight(s)] over the interval,
/// where e is the chosen endpoint. exponent must exceed -1.
struct SingularIntegralSpec {
    Interval interval;
    SingularEnd singular_end = SingularEnd::right;
    double exponent = 0.0;
    std::function<double(double)> smooth;
    std::vector<double> breakpoints;
    std::function<double(double)> substitution_weight;  ///< optional g'(s)
};

QuadResult integrate_endpoint_singular(const SingularIntegralSpec& spec, double tol = 1e-10);

/// Integral over [lo, hi] of smooth(s) * |s - singular_point|^exponent, with the
/// singular point at or outside [lo, hi]. Cells grade geometrically toward the singular
/// point; when it is an endpoint the terminal cell is integrated by product
/// integration against the exact moments of the power weight.
QuadResult integrate_power_weighted(const std::function<double(double)>& smooth, double lo,
                                    double hi, double singular_point, double exponent,
                                    std::span<const double> breakpoints = {},
                                    const AdaptiveOptions& opts = {});

/// Euler Gamma for x > 0.
double gamma_fn(double x);

/// Euler Beta B(x, y) = Gamma(x)Gamma(y)/Gamma(x+y) for x, y > 0.
double beta_fn(double x, double y);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

}  // namespace opial::quad
