#include "opial/measure.hpp"

#include <algorithm>
#include <cmath>

#include "opial/errors.hpp"

namespace opial {

namespace {

constexpr double kGolden = 0.6180339887498949;

std::vector<double> merged_breaks(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> out = x;
    out.insert(out.end(), y.begin(), y.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double golden_max(const std::function<double(double)>& fn, double lo, double hi) {
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = fn(x1);
    double f2 = fn(x2);
    double best = std::max(f1, f2);
    for (int it = 0; it < 80 && (hi - lo) > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = fn(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = fn(x1);
        }
        best = std::max({best, f1, f2});
    }
    return best;
}

}  // namespace

double sampled_max(const std::function<double(double)>& fn, double lo, double hi,
                   const std::vector<double>& breakpoints, int samples) {
    std::vector<double> pts{lo};
    for (double x : breakpoints)
        if (x > lo && x < hi) pts.push_back(x);
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());

    double best = -kInf;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double l = pts[i];
        const double r = pts[i + 1];
        const double nudge = 1e-12 * (r - l);
        std::vector<double> xs(static_cast<std::size_t>(samples));
        std::vector<double> vs(xs.size());
        std::size_t arg = 0;
        for (std::size_t j = 0; j < xs.size(); ++j) {
            double x = l + (r - l) * static_cast<double>(j) / static_cast<double>(samples - 1);
            x = std::clamp(x, l + nudge, r - nudge);
            xs[j] = x;
            const double v = fn(x);
            vs[j] = std::isnan(v) ? -kInf : v;
            if (vs[j] > vs[arg]) arg = j;
        }
        double piece_best = vs[arg];
        if (std::isfinite(piece_best)) {
            const double bl = xs[arg == 0 ? 0 : arg - 1];
            const double br = xs[std::min(arg + 1, xs.size() - 1)];
            if (br > bl) piece_best = std::max(piece_best, golden_max(fn, bl, br));
        }
        best = std::max(best, piece_best);
    }
    return best;
}

// ---------------------------------------------------------------------------------------
// Density

Density::Density(Interval interval, PiecewiseSmoothFn regular, double gamma, double delta,
                 std::string label, bool lebesgue)
    : interval_(interval),
      regular_(std::move(regular)),
      gamma_(gamma),
      delta_(delta),
      label_(std::move(label)),
      lebesgue_(lebesgue) {
    if (!(gamma_ > -1.0) || !(delta_ > -1.0))
        throw DomainError("density endpoint exponents must exceed -1 for finite mass");
    // Sampled nonnegativity check.
    const auto pts = merged_breaks({interval_.a, interval_.b}, regular_.breakpoints);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        for (int j = 0; j <= 64; ++j) {
            const double x = pts[i] + (pts[i + 1] - pts[i]) * j / 64.0;
            const double r = regular_(x);
            if (!(r >= 0.0) || !std::isfinite(r))
                throw DomainError("density must be finite and nonnegative (label " + label_ + ")");
        }
    }
}

Density Density::lebesgue(Interval interval) {
    return Density(interval, constant_fn(1.0), 0.0, 0.0, "lebesgue", true);
}

Density Density::power(Interval interval, double c, double gamma, double delta) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("power density needs c >= 0");
    return Density(interval, constant_fn(c), gamma, delta, "power", false);
}

Density Density::tabulated(PiecewisePolynomial pieces) {
    const Interval iv = pieces.interval();
    auto breaks = pieces.interior_knots();
    PiecewiseSmoothFn reg([p = std::move(pieces)](double x) { return p(x); }, std::move(breaks));
    return Density(iv, std::move(reg), 0.0, 0.0, "tabulated", false);
}

Density Density::with_endpoint_powers(Interval interval, PiecewiseSmoothFn regular, double gamma,
                                      double delta, std::string label) {
    return Density(interval, std::move(regular), gamma, delta, std::move(label), false);
}

double Density::operator()(double x) const {
    double w = regular_(x);
    if (gamma_ != 0.0) w *= std::pow(x - interval_.a, gamma_);
    if (delta_ != 0.0) w *= std::pow(interval_.b - x, delta_);
    return w;
}

double Density::limit_at_a() const {
    const double r = regular_(interval_.a);
    if (gamma_ > 0.0 || r == 0.0) return 0.0;
    if (gamma_ < 0.0) return kInf;
    return r * std::pow(interval_.length(), delta_);
}

double Density::limit_at_b() const {
    const double r = regular_(interval_.b);
    if (delta_ > 0.0 || r == 0.0) return 0.0;
    if (delta_ < 0.0) return kInf;
    return r * std::pow(interval_.length(), gamma_);
}

quad::QuadResult Density::power_integral(double lo, double hi, double power,
                                         const PiecewiseSmoothFn& u, double tol) const {
    if (lo == hi) return {};
    const double a = interval_.a;
    const double b = interval_.b;
    const auto breaks = u.fn ? merged_breaks(regular_.breakpoints, u.breakpoints)
                             : regular_.breakpoints;
    quad::AdaptiveOptions opts;
    opts.tol = tol;
    auto base = [this, &u, power](double x) {
        const double r = regular_(x);
        const double rp = power == 1.0 ? r : std::pow(r, power);
        return u.fn ? u.fn(x) * rp : rp;
    };
    const double eg = power * gamma_;
    const double ed = power * delta_;
    if (eg == 0.0 && ed == 0.0) return quad::integrate_adaptive(base, lo, hi, breaks, opts);

    // Left half graded toward a, right half toward b.
    const double mid = interval_.midpoint();
    quad::QuadResult total;
    if (lo < mid) {
        const double top = std::min(hi, mid);
        auto phi = [&base, ed, b](double x) {
            return ed == 0.0 ? base(x) : base(x) * std::pow(b - x, ed);
        };
        const auto r = quad::integrate_power_weighted(phi, lo, top, a, eg, breaks, opts);
        total.value += r.value;
        total.error += r.error;
    }
    if (hi > mid) {
        const double bottom = std::max(lo, mid);
        auto phi = [&base, eg, a](double x) {
            return eg == 0.0 ? base(x) : base(x) * std::pow(x - a, eg);
        };
        const auto r = quad::integrate_power_weighted(phi, bottom, hi, b, ed, breaks, opts);
        total.value += r.value;
        total.error += r.error;
    }
    return total;
}

// ---------------------------------------------------------------------------------------
// Measure

Measure::Measure(Density density, std::vector<Atom> atoms, bool no_mass_at_b)
    : Measure(std::move(density), std::move(atoms), no_mass_at_b, false) {}

Measure::Measure(Density density, std::vector<Atom> atoms, bool no_mass_at_b, bool zero)
    : density_(std::move(density)), atoms_(std::move(atoms)), no_mass_at_b_(no_mass_at_b),
      zero_(zero) {
    const Interval& iv = density_.interval();
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& x, const Atom& y) { return x.location < y.location; });
    std::vector<Atom> merged;
    for (const Atom& at : atoms_) {
        if (!iv.contains(at.location)) throw DomainError("atom location outside [a, b]");
        if (!(at.mass > 0.0) || !std::isfinite(at.mass))
            throw DomainError("atom masses must be positive and finite");
        if (!merged.empty() && merged.back().location == at.location)
            merged.back().mass += at.mass;
        else
            merged.push_back(at);
    }
    atoms_ = std::move(merged);
    if (no_mass_at_b_ && charges_b())
        throw PreconditionError("no_mass_at_b: measure has an atom at the right endpoint b");
    for (const Atom& at : atoms_) atom_mass_ += at.mass;
    if (!zero_) {
        try {
            density_mass_ = density_.power_integral(iv.a, iv.b, 1.0).value;
        } catch (const DivergenceError&) {
            throw DomainError("density is not integrable on [a, b]");
        }
    }
}

Measure Measure::lebesgue(Interval interval) { return Measure(Density::lebesgue(interval)); }

Measure Measure::zero(Interval interval) {
    return Measure(Density::power(interval, 0.0, 0.0, 0.0), {}, true, true);
}

bool Measure::charges_b() const noexcept {
    return !atoms_.empty() && atoms_.back().location == interval().b;
}

double Measure::mass_before(double x) const {
    const Interval& iv = interval();
    if (x <= iv.a) return 0.0;
    x = std::min(x, iv.b);
    double m = zero_ ? 0.0 : density_.power_integral(iv.a, x, 1.0).value;
    for (const Atom& at : atoms_)
        if (at.location < x) m += at.mass;
    return m;
}

double Measure::tail_mass(double x) const {
    const Interval& iv = interval();
    if (x >= iv.b) return 0.0;
    if (x <= iv.a) x = iv.a;
    double m = zero_ ? 0.0 : density_.power_integral(x, iv.b, 1.0).value;
    for (const Atom& at : atoms_)
        if (at.location >= x && at.location < iv.b) m += at.mass;
    return m;
}

double Measure::open_mass() const {
    double m = density_mass_;
    for (const Atom& at : atoms_)
        if (at.location > interval().a && at.location < interval().b) m += at.mass;
    return m;
}

Measure Measure::without_atoms() const { return Measure(density_, {}, no_mass_at_b_, zero_); }

// ---------------------------------------------------------------------------------------
// ExponentPair

ExponentPair::ExponentPair(double p_in, double q_in)
    : p(p_in), q(q_in), p_dual(dual(p_in)), q_dual(dual(q_in)) {
    if (!(p >= 1.0) || !(q >= p) || !std::isfinite(q))
        throw DomainError("exponent pair requires 1 <= p <= q < inf");
}

// ---------------------------------------------------------------------------------------
// Integration and norms

quad::QuadResult integrate_with_error(const PiecewiseSmoothFn& u, const Measure& mu, double tol) {
    const Interval& iv = mu.interval();
    quad::QuadResult r;
    if (!mu.is_zero()) r = mu.density().power_integral(iv.a, iv.b, 1.0, u, tol);
    for (const Atom& at : mu.atoms()) {
        const double v = u(at.location);
        if (!std::isfinite(v)) throw EvaluationError("non-finite integrand at atom", at.location);
        r.value += at.mass * v;
    }
    return r;
}

double integrate(const PiecewiseSmoothFn& u, const Measure& mu, double tol) {
    return integrate_with_error(u, mu, tol).value;
}

double ess_sup(const PiecewiseSmoothFn& u, const Measure& mu) {
    double best = 0.0;
    if (!mu.is_zero()) {
        const Density& w = mu.density();
        auto fn = [&](double x) { return w(x) > 0.0 ? std::abs(u(x)) : -kInf; };
        const auto breaks = merged_breaks(w.breakpoints(), u.breakpoints);
        best = std::max(best, sampled_max(fn, mu.interval().a, mu.interval().b, breaks));
    }
    for (const Atom& at : mu.atoms()) best = std::max(best, std::abs(u(at.location)));
    return best;
}

quad::QuadResult lp_norm_with_error(const PiecewiseSmoothFn& u, double p, const Measure& mu,
                                    double tol) {
    if (std::isnan(p) || p < 1.0) throw DomainError("lp_norm requires p >= 1");
    if (p == kInf) return {ess_sup(u, mu), 0.0};
    PiecewiseSmoothFn up(
        [&u, p](double x) {
            const double v = std::abs(u(x));
            return p == 1.0 ? v : std::pow(v, p);
        },
        u.breakpoints);
    const auto r = integrate_with_error(up, mu, tol);
    if (r.value <= 0.0) return {0.0, 0.0};
    const double norm = std::pow(r.value, 1.0 / p);
    // d(I^{1/p}) = (1/p) I^{1/p - 1} dI
    return {norm, norm * r.error / (p * r.value)};
}

double lp_norm(const PiecewiseSmoothFn& u, double p, const Measure& mu, double tol) {
    return lp_norm_with_error(u, p, mu, tol).value;
}

double inverse_density_norm(const Measure& mu, double p, double x, double tol) {
    if (std::isnan(p) || p < 1.0) throw DomainError("inverse_density_norm requires p >= 1");
    const Interval& iv = mu.interval();
    if (!(x >= iv.a) || !(x <= iv.b)) throw DomainError("sub-interval [a, x] must lie in [a, b]");
    if (x == iv.a) return 0.0;
    if (mu.is_zero()) return kInf;
    const Density& w = mu.density();

    if (p == 1.0) {
        if (w.gamma() > 0.0) return kInf;
        if (x == iv.b && w.delta() > 0.0) return kInf;
        auto neg_w = [&w](double t) { return -w(t); };
        const double inf_w = -sampled_max(neg_w, iv.a, x, w.breakpoints());
        return inf_w > 0.0 ? 1.0 / inf_w : kInf;
    }

    const double r = 1.0 / (p - 1.0);
    try {
        const double integral = w.power_integral(iv.a, x, -r, {}, tol).value;
        if (!std::isfinite(integral)) return kInf;
        return std::pow(integral, p - 1.0);
    } catch (const DivergenceError&) {
        return kInf;
    } catch (const EvaluationError&) {
        return kInf;
    } catch (const ConvergenceFailure&) {
        return kInf;
    }
}

}  // namespace opial
