#include "opial/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opial/errors.hpp"

namespace opial {

namespace {

constexpr int kValidationSamples = 64;
constexpr double kNearFraction = 0.05;  // relative span below which increments use quadrature

std::vector<double> breaks_inside(const std::vector<double>& breaks, double lo, double hi) {
    std::vector<double> out;
    for (double x : breaks)
        if (x > lo && x < hi) out.push_back(x);
    std::sort(out.begin(), out.end());
    return out;
}

// integral_s^t g'(x) dx by 16-point Gauss-Legendre.
double increment_by_quadrature(const std::function<double(double)>& dg, double t, double s) {
    static const quad::GaussRule rule = quad::gauss_legendre(16);
    const double half = 0.5 * (t - s);
    const double mid = 0.5 * (t + s);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * dg(mid + half * rule.nodes[i]);
    return half * sum;
}

}  // namespace

GFunction GFunction::identity() {
    return {"identity", [](double t) { return t; }, [](double) { return 1.0; },
            [](double u) { return u; }, [](double t, double s) { return t - s; }};
}

GFunction GFunction::log() {
    return {"log", [](double t) { return std::log(t); }, [](double t) { return 1.0 / t; },
            [](double u) { return std::exp(u); },
            [](double t, double s) { return std::log1p((t - s) / s); }};
}

GFunction GFunction::power(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw DomainError("power g needs an exponent gamma > 0");
    return {"power",
            [gamma](double t) { return std::pow(t, gamma); },
            [gamma](double t) { return gamma * std::pow(t, gamma - 1.0); },
            [gamma](double u) { return std::pow(u, 1.0 / gamma); },
            [gamma](double t, double s) {
                if (s == 0.0) return std::pow(t, gamma);
                return std::pow(s, gamma) * std::expm1(gamma * std::log1p((t - s) / s));
            }};
}

KernelShape KernelShape::power_law() {
    return {"power_law",
            [](double x, double alpha) { return quad::gamma_fn(alpha) * std::pow(x, 1.0 - alpha); },
            [](double alpha) { return 1.0 - alpha; }};
}

std::string to_string(KernelTag tag) {
    switch (tag) {
        case KernelTag::rl: return "RL";
        case KernelTag::hadamard: return "Hadamard";
        case KernelTag::g_weighted: return "g-weighted";
        case KernelTag::custom: return "custom";
    }
    return "custom";
}

TKernel::TKernel(Interval interval, double alpha, GFunction g, KernelShape shape, KernelTag tag)
    : interval_(interval), alpha_(alpha), g_(std::move(g)), shape_(std::move(shape)), tag_(tag) {
    if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) throw DomainError("kernel order must be > 0");
    if (!g_.g || !g_.derivative) throw DomainError("kernel needs g and g'");
    if (!shape_.G || !shape_.order) throw DomainError("kernel needs G and its order at 0");
    const double span = increment(interval_.b, interval_.a);
    if (!(span > 0.0) || !std::isfinite(span))
        throw InvariantViolation("g must be increasing with g(b) - g(a) finite");
    for (int i = 1; i < kValidationSamples; ++i) {
        const double s = interval_.a + interval_.length() * i / kValidationSamples;
        const double dg = g_.derivative(s);
        if (!(dg > 0.0) || !std::isfinite(dg))
            throw InvariantViolation("g' must be positive on (a, b); fails at s = " +
                                     std::to_string(s));
        const double x = span * i / kValidationSamples;
        const double G = shape_.G(x, alpha_);
        if (!(G > 0.0) || !std::isfinite(G))
            throw InvariantViolation("G must be positive on (0, g(b) - g(a)]");
    }
    if (!(shape_.G(span, alpha_) > 0.0)) throw InvariantViolation("G must be positive at g(b) - g(a)");
}

TKernel TKernel::with_order(double alpha) const {
    return TKernel(interval_, alpha, g_, shape_, tag_);
}

double TKernel::increment(double t, double s) const {
    if (t == s) return 0.0;
    if (g_.increment) return g_.increment(t, s);
    if (std::abs(t - s) < kNearFraction * interval_.length())
        return increment_by_quadrature(g_.derivative, t, s);
    return g_.g(t) - g_.g(s);
}

double t_eval(const TKernel& k, double t, double s) {
    const Interval& iv = k.interval();
    if (!iv.contains(t) || !iv.contains(s)) throw DomainError("T evaluated outside [a, b]");
    const double dg = k.g().derivative(s);
    if (!(dg > 0.0)) throw InvariantViolation("g'(s) <= 0 at s = " + std::to_string(s));
    return k.shape().G(std::abs(k.increment(t, s)), k.alpha()) / dg;
}

namespace {

// Shared worker for both sides. `right` selects J_{a+} (integral over [a, t], singular at
// s = t from the left) versus J_{b-} (over [t, b], singular at s = t from the right).
quad::QuadResult j_side(const TKernel& k, const PiecewiseSmoothFn& f, double t, double tol,
                        JRoute route, bool right) {
    const Interval& iv = k.interval();
    if (!iv.contains(t)) throw DomainError("J evaluated outside [a, b]");
    if (!(tol > 0.0)) throw DomainError("tol must be > 0");
    const double lo = right ? iv.a : t;
    const double hi = right ? t : iv.b;
    if (lo == hi) return {};

    const double alpha = k.alpha();
    const double lambda = k.singular_order();
    const auto& G = k.shape().G;
    const bool substitute =
        route == JRoute::substitution || (route == JRoute::automatic && k.g().inverse);
    if (route == JRoute::substitution && !k.g().inverse)
        throw DomainError("substitution route needs g^{-1}");

    if (substitute) {
        // u = g(s): integral f(g^{-1}(u)) / G(|g(t) - u|) du, singular at u = g(t).
        const auto& g = k.g();
        const double gt = g.g(t);
        const double ulo = right ? g.g(lo) : gt;
        const double uhi = right ? gt : g.g(hi);
        if (!(ulo < uhi)) return {};
        std::vector<double> ubreaks;
        for (double x : breaks_inside(f.breakpoints, lo, hi)) ubreaks.push_back(g.g(x));
        auto smooth = [&, gt](double u) {
            const double s = std::clamp(g.inverse(u), iv.a, iv.b);
            const double d = std::abs(gt - u);
            return f(s) * std::pow(d, lambda) / G(d, alpha);
        };
        quad::SingularIntegralSpec spec{Interval(ulo, uhi),
                                        right ? quad::SingularEnd::right : quad::SingularEnd::left,
                                        -lambda, smooth, std::move(ubreaks), {}};
        return quad::integrate_endpoint_singular(spec, tol);
    }

    auto smooth = [&, t](double s) {
        const double d = std::abs(t - s);
        const double dg = std::abs(k.increment(t, s));
        return f(s) * std::pow(d, lambda) / G(dg, alpha);
    };
    quad::SingularIntegralSpec spec{Interval(lo, hi),
                                    right ? quad::SingularEnd::right : quad::SingularEnd::left,
                                    -lambda, smooth, breaks_inside(f.breakpoints, lo, hi),
                                    [&](double s) { return k.g().derivative(s); }};
    return quad::integrate_endpoint_singular(spec, tol);
}

constexpr int kRichardsonLevels = 8;
constexpr double kInnerTol = 1e-13;

quad::QuadResult derivative_side(const TKernel& k, const PiecewiseSmoothFn& f, double t,
                                 double tol, bool right) {
    const Interval& iv = k.interval();
    if (!(k.alpha() > 0.0 && k.alpha() < 1.0))
        throw DomainError("generalized derivative needs 0 < alpha < 1");
    if (!(t > iv.a && t < iv.b)) throw DomainError("derivative needs t in the open interval");
    const TKernel k1 = k.with_order(1.0 - k.alpha());
    auto F = [&](double x) { return j_side(k1, f, x, kInnerTol, JRoute::automatic, right).value; };

    double h = std::min(1e-3 * iv.length(), 0.5 * std::min(t - iv.a, iv.b - t));
    // Neville table of central differences, step halved per row, error ~ h^2.
    std::vector<std::vector<double>> table;
    double best = 0.0;
    double best_err = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kRichardsonLevels; ++i, h *= 0.5) {
        std::vector<double> row{(F(t + h) - F(t - h)) / (2.0 * h)};
        double factor = 4.0;
        for (int j = 1; j <= i; ++j, factor *= 4.0)
            row.push_back(row[j - 1] + (row[j - 1] - table[i - 1][j - 1]) / (factor - 1.0));
        if (i > 0) {
            const double err = std::max(std::abs(row[i] - row[i - 1]),
                                        std::abs(row[i] - table[i - 1][i - 1]));
            if (err < best_err) {
                best_err = err;
                best = row[i];
            }
        }
        table.push_back(std::move(row));
        if (best_err <= 0.01 * tol * std::max(1.0, std::abs(best))) break;
    }
    const double scale = (right ? 1.0 : -1.0) / k.g().derivative(t);
    if (best_err > tol * std::max(1.0, std::abs(best)))
        throw ConvergenceFailure("Richardson extrapolation did not settle", scale * best,
                                 std::abs(scale) * best_err);
    return {scale * best, std::abs(scale) * best_err};
}

}  // namespace

quad::QuadResult j_right_with_error(const TKernel& k, const PiecewiseSmoothFn& f, double t,
                                    double tol, JRoute route) {
    return j_side(k, f, t, tol, route, true);
}

quad::QuadResult j_left_with_error(const TKernel& k, const PiecewiseSmoothFn& f, double t,
                                   double tol, JRoute route) {
    return j_side(k, f, t, tol, route, false);
}

double j_right(const TKernel& k, const PiecewiseSmoothFn& f, double t, double tol) {
    return j_side(k, f, t, tol, JRoute::automatic, true).value;
}

double j_left(const TKernel& k, const PiecewiseSmoothFn& f, double t, double tol) {
    return j_side(k, f, t, tol, JRoute::automatic, false).value;
}

quad::QuadResult d_right_with_error(const TKernel& k, const PiecewiseSmoothFn& f, double t,
                                    double tol) {
    return derivative_side(k, f, t, tol, true);
}

quad::QuadResult d_left_with_error(const TKernel& k, const PiecewiseSmoothFn& f, double t,
                                   double tol) {
    return derivative_side(k, f, t, tol, false);
}

double d_right(const TKernel& k, const PiecewiseSmoothFn& f, double t, double tol) {
    return derivative_side(k, f, t, tol, true).value;
}

double d_left(const TKernel& k, const PiecewiseSmoothFn& f, double t, double tol) {
    return derivative_side(k, f, t, tol, false).value;
}

bool in_L1T(const TKernel& k, const PiecewiseSmoothFn& f, std::span<const double> grid) {
    PiecewiseSmoothFn abs_f([&f](double s) { return std::abs(f(s)); }, f.breakpoints);
    try {
        for (double t : grid) {
            const double r = j_side(k, abs_f, t, 1e-8, JRoute::automatic, true).value;
            const double l = j_side(k, abs_f, t, 1e-8, JRoute::automatic, false).value;
            if (!std::isfinite(r) || !std::isfinite(l)) return false;
        }
    } catch (const DivergenceError&) {
        return false;
    } catch (const ConvergenceFailure&) {
        return false;
    } catch (const EvaluationError&) {
        return false;
    }
    return true;
}

TKernel make_specialization(KernelTag tag, double alpha, Interval interval,
                            std::optional<GFunction> g) {
    switch (tag) {
        case KernelTag::rl:
            return TKernel(interval, alpha, GFunction::identity(), KernelShape::power_law(), tag);
        case KernelTag::hadamard:
            if (!(interval.a > 0.0)) throw DomainError("Hadamard kernel needs a > 0");
            return TKernel(interval, alpha, GFunction::log(), KernelShape::power_law(), tag);
        case KernelTag::g_weighted:
            if (!g) throw DomainError("g-weighted kernel needs a function g");
            if (g->name == "log" && !(interval.a > 0.0))
                throw DomainError("g = log needs a > 0");
            return TKernel(interval, alpha, *g, KernelShape::power_law(), tag);
        case KernelTag::custom:
            break;
    }
    throw DomainError("make_specialization covers RL, Hadamard and g-weighted only");
}

Density induced_density(const TKernel& k) {
    const Interval iv = k.interval();
    const double lambda = k.singular_order();
    if (!(lambda < 1.0)) throw DivergenceError("1/T(b, s, alpha) is not integrable at s = b");
    // w(s) = r(s) (b - s)^{-lambda}, with r(s) = g'(s) (b - s)^lambda / G(g(b) - g(s)).
    const double b_near = iv.b - 1e-9 * iv.length();
    auto regular = [k, lambda, b = iv.b, b_near](double s) {
        const double x = std::min(s, b_near);
        const double d = b - x;
        return k.g().derivative(x) * std::pow(d, lambda) /
               k.shape().G(k.increment(b, x), k.alpha());
    };
    return Density::with_endpoint_powers(iv, PiecewiseSmoothFn(regular), 0.0, -lambda,
                                         "fractional " + to_string(k.tag()));
}

}  // namespace opial
