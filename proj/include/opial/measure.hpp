#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "opial/interval.hpp"
#include "opial/polynomial.hpp"
#include "opial/quad.hpp"

namespace opial {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Product with the convention 0 * inf = 0: an exact zero factor wins.
inline double product_zero_wins(double x, double y) {
    if (x == 0.0 || y == 0.0) return 0.0;
    return x * y;
}

/// Nonnegative density on [a, b] of the form
///   w(x) = r(x) * (x - a)^gamma * (b - x)^delta,
/// with r piecewise smooth and evaluable on the closed interval. The endpoint powers are
/// declared so quadrature and ess-sup code can treat them exactly.
class Density {
public:
    static Density lebesgue(Interval interval);
    /// c * (x - a)^gamma * (b - x)^delta; gamma, delta > -1 keeps the mass finite.
    static Density power(Interval interval, double c, double gamma, double delta);
    static Density tabulated(PiecewisePolynomial pieces);
    static Density with_endpoint_powers(Interval interval, PiecewiseSmoothFn regular,
                                        double gamma, double delta, std::string label);

    const Interval& interval() const noexcept { return interval_; }
    double gamma() const noexcept { return gamma_; }
    double delta() const noexcept { return delta_; }
    const std::vector<double>& breakpoints() const noexcept { return regular_.breakpoints; }
    const std::string& label() const noexcept { return label_; }
    bool is_lebesgue() const noexcept { return lebesgue_; }

    double operator()(double x) const;
    double regular(double x) const { return regular_(x); }

    /// Limit of w(x) as x -> a+ (0 or +inf when gamma != 0).
    double limit_at_a() const;
    /// Limit of w(x) as x -> b-.
    double limit_at_b() const;

    /// Integral over [lo, hi] of u(x) * w(x)^power, with the endpoint powers of w handled
    /// by graded quadrature. Pass an empty u for u = 1. Throws DivergenceError when an
    /// endpoint power becomes non-integrable.
    quad::QuadResult power_integral(double lo, double hi, double power,
                                    const PiecewiseSmoothFn& u = {}, double tol = 1e-10) const;

private:
    Density(Interval interval, PiecewiseSmoothFn regular, double gamma, double delta,
            std::string label, bool lebesgue);

    Interval interval_;
    PiecewiseSmoothFn regular_;
    double gamma_ = 0.0;
    double delta_ = 0.0;
    std::string label_;
    bool lebesgue_ = false;
};

struct Atom {
    double location;
    double mass;
};

/// Density plus finitely many atoms on [a, b].
class Measure {
public:
    /// `no_mass_at_b` declares mu({b}) = 0; an atom at b then raises PreconditionError.
    Measure(Density density, std::vector<Atom> atoms = {}, bool no_mass_at_b = true);
    static Measure lebesgue(Interval interval);
    static Measure zero(Interval interval);

    const Interval& interval() const noexcept { return density_.interval(); }
    const Density& density() const noexcept { return density_; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    bool no_mass_at_b() const noexcept { return no_mass_at_b_; }
    /// True when an atom sits at b.
    bool charges_b() const noexcept;
    bool is_zero() const noexcept { return zero_; }

    double total_mass() const noexcept { return density_mass_ + atom_mass_; }
    double density_mass() const noexcept { return density_mass_; }
    /// mu([a, x)).
    double mass_before(double x) const;
    /// mu([x, b)); atoms at x belong to the tail.
    double tail_mass(double x) const;
    /// mu((a, b)).
    double open_mass() const;

    Measure without_atoms() const;

private:
    Measure(Density density, std::vector<Atom> atoms, bool no_mass_at_b, bool zero);

    Density density_;
    std::vector<Atom> atoms_;
    bool no_mass_at_b_;
    bool zero_ = false;
    double density_mass_ = 0.0;
    double atom_mass_ = 0.0;
};

/// (p, q) with 1 <= p <= q < inf and their duals (inf for exponent 1).
struct ExponentPair {
    double p;
    double q;
    double p_dual;
    double q_dual;

    ExponentPair(double p_in, double q_in);
    static double dual(double r) { return r == 1.0 ? kInf : r / (r - 1.0); }
};

/// integral of u dmu = integral of u w dx + sum of m u(x_atom).
quad::QuadResult integrate_with_error(const PiecewiseSmoothFn& u, const Measure& mu,
                                      double tol = 1e-10);
double integrate(const PiecewiseSmoothFn& u, const Measure& mu, double tol = 1e-10);

/// Essential supremum of |u| with respect to mu: sup over the density support plus the
/// atom locations.
double ess_sup(const PiecewiseSmoothFn& u, const Measure& mu);

/// (integral |u|^p dmu)^(1/p) for finite p >= 1; ess sup for p = inf.
quad::QuadResult lp_norm_with_error(const PiecewiseSmoothFn& u, double p, const Measure& mu,
                                    double tol = 1e-10);
double lp_norm(const PiecewiseSmoothFn& u, double p, const Measure& mu, double tol = 1e-10);

/// || 1/w ||_{L^{1/(p-1)}([a, x])}: (integral_a^x w^{-1/(p-1)})^{p-1} for p > 1 and the ess
/// sup of 1/w on [a, x] for p = 1. Returns +inf when the norm diverges.
double inverse_density_norm(const Measure& mu, double p, double x, double tol = 1e-10);

/// Number of uniform samples per smooth piece used by sup/inf scans.
inline constexpr int kSupSamplesPerPiece = 4097;

/// Max of fn over the pieces of [lo, hi] cut at `breakpoints`, sampling each piece on a
/// uniform grid (ends nudged inward) and refining the best sample by golden section.
double sampled_max(const std::function<double(double)>& fn, double lo, double hi,
                   const std::vector<double>& breakpoints, int samples = kSupSamplesPerPiece);

}  // namespace opial
