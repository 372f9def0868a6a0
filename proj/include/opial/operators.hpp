#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opial/interval.hpp"
#include "opial/measure.hpp"
#include "opial/quad.hpp"

namespace opial {

/// Increasing function g with positive derivative, as used inside T.
struct GFunction {
    std::string name;
    std::function<double(double)> g;
    std::function<double(double)> derivative;
    /// Optional g^{-1}; enables integration in the variable u = g(s).
    std::function<double(double)> inverse;
    /// Optional cancellation-free g(t) - g(s). When absent a short Gauss-Legendre
    /// integral of g' is used for nearby arguments.
    std::function<double(double, double)> increment;

    static GFunction identity();
    static GFunction log();
    /// g(t) = t^gamma, gamma > 0 (needs a >= 0).
    static GFunction power(double gamma);
};

/// G(x, alpha) together with its behaviour at x -> 0+: G(x, alpha) ~ x^order(alpha).
/// 1/T is integrable at s = t iff order(alpha) < 1.
struct KernelShape {
    std::string name;
    std::function<double(double, double)> G;
    std::function<double(double)> order;

    /// Gamma(alpha) x^{1-alpha}, the shape shared by all named specializations.
    static KernelShape power_law();
};

enum class KernelTag { rl, hadamard, g_weighted, custom };

std::string to_string(KernelTag tag);

/// T(t, s, alpha) = G(|g(t) - g(s)|, alpha) / g'(s) on [a, b].
class TKernel {
public:
    /// Throws DomainError for alpha <= 0 and InvariantViolation when g' or G fail to be
    /// positive at the sampled points.
    TKernel(Interval interval, double alpha, GFunction g, KernelShape shape,
            KernelTag tag = KernelTag::custom);

    const Interval& interval() const noexcept { return interval_; }
    double alpha() const noexcept { return alpha_; }
    KernelTag tag() const noexcept { return tag_; }
    const GFunction& g() const noexcept { return g_; }
    const KernelShape& shape() const noexcept { return shape_; }

    /// Same g and G with a different order.
    TKernel with_order(double alpha) const;

    /// g(t) - g(s), accurate when t and s are close.
    double increment(double t, double s) const;
    /// Exponent lambda with G(x, alpha) ~ x^lambda at 0.
    double singular_order() const { return shape_.order(alpha_); }

private:
    Interval interval_;
    double alpha_;
    GFunction g_;
    KernelShape shape_;
    KernelTag tag_;
};

/// T(t, s, alpha). Throws InvariantViolation if g'(s) <= 0 and DomainError outside [a, b].
double t_eval(const TKernel& k, double t, double s);

enum class JRoute {
    automatic,     ///< substitution when g^{-1} is known, direct otherwise
    direct,        ///< integrate in s
    substitution,  ///< integrate in u = g(s)
};

/// J_{T,a+} f(t) = integral_a^t f(s) / T(t, s, alpha) ds.
quad::QuadResult j_right_with_error(const TKernel& k, const PiecewiseSmoothFn& f, double t,
                                    double tol = 1e-10, JRoute route = JRoute::automatic);
/// J_{T,b-} f(t) = integral_t^b f(s) / T(t, s, alpha) ds.
quad::QuadResult j_left_with_error(const TKernel& k, const PiecewiseSmoothFn& f, double t,
                                   double tol = 1e-10, JRoute route = JRoute::automatic);

double j_right(const TKernel& k, const PiecewiseSmoothFn& f, double t, double tol = 1e-10);
double j_left(const TKernel& k, const PiecewiseSmoothFn& f, double t, double tol = 1e-10);

/// D_{T,a+} f(t) = (1/g'(t)) d/dt J^{1-alpha}_{T,a+} f(t), by Richardson-extrapolated
/// central differences. Requires 0 < alpha < 1 and a < t < b. Throws ConvergenceFailure
/// when the extrapolated error estimate stays above tol * max(1, |value|).
quad::QuadResult d_right_with_error(const TKernel& k, const PiecewiseSmoothFn& f, double t,
                                    double tol = 1e-6);
/// D_{T,b-} f(t) = -(1/g'(t)) d/dt J^{1-alpha}_{T,b-} f(t).
quad::QuadResult d_left_with_error(const TKernel& k, const PiecewiseSmoothFn& f, double t,
                                   double tol = 1e-6);

double d_right(const TKernel& k, const PiecewiseSmoothFn& f, double t, double tol = 1e-6);
double d_left(const TKernel& k, const PiecewiseSmoothFn& f, double t, double tol = 1e-6);

/// True iff J_{T,a+}|f| and J_{T,b-}|f| are finite at every grid point.
bool in_L1T(const TKernel& k, const PiecewiseSmoothFn& f, std::span<const double> grid);

/// Named kernels: RL (g = t), Hadamard (g = log t, a > 0) and g-weighted (g supplied).
/// All use G = Gamma(alpha) x^{1-alpha}.
TKernel make_specialization(KernelTag tag, double alpha, Interval interval,
                            std::optional<GFunction> g = std::nullopt);

/// Density s -> 1/T(b, s, alpha) = g'(s) / G(g(b) - g(s), alpha) on [a, b].
Density induced_density(const TKernel& k);

}  // namespace opial
