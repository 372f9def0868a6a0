#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "opial/errors.hpp"
#include "opial/func.hpp"
#include "opial/operators.hpp"

using namespace opial;
namespace bm = boost::math;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

const Interval kUnit(0.0, 1.0);

// Random smooth test functions, written as sums of terms with closed-form images.
struct Terms {
    std::vector<double> coeff;
    std::vector<double> power;
};

Terms random_terms(std::mt19937_64& rng, double pmin, double pmax, int n) {
    Terms t;
    for (int i = 0; i < n; ++i) {
        t.coeff.push_back(-1.0 + 2.0 * unit_uniform(rng()));
        t.power.push_back(pmin + (pmax - pmin) * unit_uniform(rng()));
    }
    return t;
}

}  // namespace

TEST_CASE("t_eval examples") {
    const TKernel rl = make_specialization(KernelTag::rl, 0.5, kUnit);
    CHECK(rel_err(t_eval(rl, 1.0, 0.0), std::sqrt(std::numbers::pi)) < 1e-14);
    const TKernel rl1 = make_specialization(KernelTag::rl, 1.0, kUnit);
    for (double s : {0.0, 0.3, 0.9}) CHECK(t_eval(rl1, 0.6, s) == 1.0);

    const TKernel had1 = make_specialization(KernelTag::hadamard, 1.0, Interval(1.0, 3.0));
    for (auto [t, s] : {std::pair{2.0, 1.5}, {1.2, 2.9}, {3.0, 1.0}})
        CHECK(rel_err(t_eval(had1, t, s), s) < 1e-14);

    const TKernel had = make_specialization(KernelTag::hadamard, 0.5, Interval(1.0, std::numbers::e));
    const double want = std::sqrt(std::numbers::pi) * 1.3 * std::sqrt(std::abs(std::log(2.1 / 1.3)));
    CHECK(rel_err(t_eval(had, 2.1, 1.3), want) < 1e-14);

    const TKernel gw =
        make_specialization(KernelTag::g_weighted, 0.5, Interval(1.0, 2.0), GFunction::power(2.0));
    const double gw_want = std::sqrt(std::numbers::pi) * std::sqrt(std::abs(1.9 * 1.9 - 1.2 * 1.2)) / 2.4;
    CHECK(rel_err(t_eval(gw, 1.9, 1.2), gw_want) < 1e-14);
    CHECK_THROWS_AS(t_eval(rl, 1.5, 0.0), DomainError);
}

TEST_CASE("kernel construction errors") {
    CHECK_THROWS_AS(make_specialization(KernelTag::hadamard, 0.5, Interval(0.0, 1.0)), DomainError);
    CHECK_THROWS_AS(make_specialization(KernelTag::hadamard, 0.5, Interval(-1.0, 1.0)), DomainError);
    CHECK_THROWS_AS(make_specialization(KernelTag::rl, 0.0, kUnit), DomainError);
    CHECK_THROWS_AS(make_specialization(KernelTag::g_weighted, 0.5, kUnit), DomainError);

    // g' dips negative on a tiny set missed by the constructor's sampling.
    GFunction dip{"dip", [](double t) { return t; },
                  [](double t) { return std::abs(t - 0.30001) < 1e-7 ? -1.0 : 1.0; }, {}, {}};
    const TKernel k(kUnit, 0.5, dip, KernelShape::power_law());
    CHECK_THROWS_AS(t_eval(k, 0.9, 0.30001), InvariantViolation);
    GFunction decreasing{"neg", [](double t) { return -t; }, [](double) { return -1.0; }, {}, {}};
    CHECK_THROWS_AS(TKernel(kUnit, 0.5, decreasing, KernelShape::power_law()), InvariantViolation);
}

TEST_CASE("j_right and j_left examples") {
    const TKernel rl = make_specialization(KernelTag::rl, 0.5, kUnit);
    CHECK(rel_err(j_right(rl, constant_fn(1.0), 1.0), 1.0 / std::tgamma(1.5)) < 1e-12);
    CHECK(rel_err(j_left(rl, constant_fn(1.0), 0.0), 1.0 / std::tgamma(1.5)) < 1e-12);
    CHECK(j_right(rl, constant_fn(1.0), 0.0) == 0.0);

    const TKernel rl1 = make_specialization(KernelTag::rl, 1.0, kUnit);
    for (double t : {0.25, 0.5, 0.8}) CHECK(rel_err(j_right(rl1, constant_fn(1.0), t), t) < 1e-14);

    const TKernel had = make_specialization(KernelTag::hadamard, 1.0, Interval(1.0, 3.0));
    CHECK(rel_err(j_right(had, constant_fn(1.0), std::numbers::e), 1.0) < 1e-13);
    CHECK_THROWS_AS(j_right(rl, constant_fn(1.0), 1.1), DomainError);
}

TEST_CASE("RL specialization matches the closed-form Riemann-Liouville integral") {
    // J^alpha (s - a)^k (t) = Gamma(k+1)/Gamma(k+1+alpha) (t - a)^{k+alpha}; mirrored for b-.
    const Interval iv(-0.5, 1.5);
    std::mt19937_64 rng(101);
    for (double alpha : {0.3, 0.5, 0.8}) {
        const TKernel k = make_specialization(KernelTag::rl, alpha, iv);
        const Terms terms = random_terms(rng, 0.0, 3.0, 3);
        PiecewiseSmoothFn fr([&](double s) {
            double v = 0.0;
            for (std::size_t i = 0; i < terms.coeff.size(); ++i)
                v += terms.coeff[i] * std::pow(s - iv.a, terms.power[i]);
            return v;
        });
        PiecewiseSmoothFn fl([&](double s) {
            double v = 0.0;
            for (std::size_t i = 0; i < terms.coeff.size(); ++i)
                v += terms.coeff[i] * std::pow(iv.b - s, terms.power[i]);
            return v;
        });
        for (int j = 1; j <= 10; ++j) {
            const double t = iv.a + iv.length() * j / 10.5;
            double want_r = 0.0;
            double want_l = 0.0;
            for (std::size_t i = 0; i < terms.coeff.size(); ++i) {
                const double kk = terms.power[i];
                const double ratio = bm::tgamma_ratio(kk + 1.0, kk + 1.0 + alpha);
                want_r += terms.coeff[i] * ratio * std::pow(t - iv.a, kk + alpha);
                want_l += terms.coeff[i] * ratio * std::pow(iv.b - t, kk + alpha);
            }
            CAPTURE(alpha);
            CAPTURE(t);
            CHECK(std::abs(j_right(k, fr, t) - want_r) < 1e-8 * std::max(1.0, std::abs(want_r)));
            CHECK(std::abs(j_left(k, fl, t) - want_l) < 1e-8 * std::max(1.0, std::abs(want_l)));
        }
    }
}

TEST_CASE("Hadamard specialization matches the incomplete-gamma closed form") {
    // (1/Gamma(alpha)) int_a^t log(t/s)^{alpha-1} s^{mu-1} ds = t^mu mu^-alpha P(alpha, mu log(t/a))
    const Interval iv(1.0, 3.0);
    std::mt19937_64 rng(202);
    for (double alpha : {0.3, 0.5, 0.8}) {
        const TKernel k = make_specialization(KernelTag::hadamard, alpha, iv);
        const Terms up = random_terms(rng, 0.2, 2.0, 3);
        const Terms down = random_terms(rng, 0.2, 2.0, 3);
        PiecewiseSmoothFn fr([&](double s) {
            double v = 0.0;
            for (std::size_t i = 0; i < 3; ++i) v += up.coeff[i] * std::pow(s, up.power[i]);
            return v;
        });
        PiecewiseSmoothFn fl([&](double s) {
            double v = 0.0;
            for (std::size_t i = 0; i < 3; ++i) v += down.coeff[i] * std::pow(s, -down.power[i]);
            return v;
        });
        for (int j = 1; j <= 10; ++j) {
            const double t = iv.a + iv.length() * j / 10.5;
            double want_r = 0.0;
            double want_l = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                const double mu = up.power[i];
                want_r += up.coeff[i] * std::pow(t, mu) * std::pow(mu, -alpha) *
                          bm::gamma_p(alpha, mu * std::log(t / iv.a));
                const double nu = down.power[i];
                want_l += down.coeff[i] * std::pow(t, -nu) * std::pow(nu, -alpha) *
                          bm::gamma_p(alpha, nu * std::log(iv.b / t));
            }
            CAPTURE(alpha);
            CAPTURE(t);
            CHECK(std::abs(j_right(k, fr, t) - want_r) < 1e-8 * std::max(1.0, std::abs(want_r)));
            CHECK(std::abs(j_left(k, fl, t) - want_l) < 1e-8 * std::max(1.0, std::abs(want_l)));
        }
    }
}

TEST_CASE("g-weighted specialization matches the incomplete-beta closed form") {
    // g = t^2 on [1, 2], f = g(s)^m. Right side via the incomplete Beta function, left side
    // by binomial expansion of (T + w)^m in w = u - g(t).
    const Interval iv(1.0, 2.0);
    std::mt19937_64 rng(303);
    for (double alpha : {0.3, 0.5, 0.8}) {
        const TKernel k =
            make_specialization(KernelTag::g_weighted, alpha, iv, GFunction::power(2.0));
        std::vector<double> c;
        for (int m = 0; m < 3; ++m) c.push_back(-1.0 + 2.0 * unit_uniform(rng()));
        PiecewiseSmoothFn f([&](double s) {
            const double u = s * s;
            return c[0] + u * (c[1] + u * c[2]);
        });
        for (int j = 1; j <= 10; ++j) {
            const double t = iv.a + iv.length() * j / 10.5;
            const double T = t * t;
            const double A = iv.a * iv.a;
            const double W = iv.b * iv.b - T;
            double want_r = 0.0;
            double want_l = 0.0;
            for (int m = 0; m < 3; ++m) {
                want_r += c[m] * std::pow(T, m + alpha) * bm::beta(m + 1.0, alpha) *
                          bm::ibetac(m + 1.0, alpha, A / T);
                double binom = 1.0;
                for (int i = 0; i <= m; ++i) {
                    want_l += c[m] * binom * std::pow(T, m - i) * std::pow(W, i + alpha) / (i + alpha);
                    binom = binom * (m - i) / (i + 1);
                }
            }
            want_r /= bm::tgamma(alpha);
            want_l /= bm::tgamma(alpha);
            CAPTURE(alpha);
            CAPTURE(t);
            CHECK(std::abs(j_right(k, f, t) - want_r) < 1e-8 * std::max(1.0, std::abs(want_r)));
            CHECK(std::abs(j_left(k, f, t) - want_l) < 1e-8 * std::max(1.0, std::abs(want_l)));
        }
    }
}

TEST_CASE("direct and substitution routes agree on piecewise functions") {
    std::mt19937_64 rng(404);
    struct Case {
        KernelTag tag;
        Interval iv;
        std::optional<GFunction> g;
    };
    const std::vector<Case> cases{{KernelTag::rl, Interval(0.0, 2.0), std::nullopt},
                                  {KernelTag::hadamard, Interval(0.5, 4.0), std::nullopt},
                                  {KernelTag::g_weighted, Interval(0.0, 1.0), GFunction::power(1.5)}};
    for (const Case& c : cases) {
        for (double alpha : {0.3, 0.8, 1.4}) {
            const TKernel k = make_specialization(c.tag, alpha, c.iv, c.g);
            const auto fam = random_ac_family(c.iv, rng(), 3, false, 3);
            for (const auto& f : fam) {
                const auto v = f.value_fn();
                for (double frac : {0.13, 0.5, 0.91}) {
                    const double t = c.iv.a + frac * c.iv.length();
                    for (bool right : {true, false}) {
                        auto run = [&](JRoute r) {
                            return right ? j_right_with_error(k, v, t, 1e-12, r).value
                                         : j_left_with_error(k, v, t, 1e-12, r).value;
                        };
                        const double d = run(JRoute::direct);
                        const double s = run(JRoute::substitution);
                        CAPTURE(to_string(c.tag));
                        CAPTURE(alpha);
                        CHECK(std::abs(d - s) < 1e-10 * std::max(1.0, std::abs(s)));
                    }
                }
            }
        }
    }
}

TEST_CASE("custom g without an inverse uses the direct route with quadrature increments") {
    // g(t) = t + t^3 / 3: no increment callback, so nearby differences use quadrature of g'.
    GFunction g{"cubic", [](double t) { return t + t * t * t / 3.0; },
                [](double t) { return 1.0 + t * t; }, {}, {}};
    const Interval iv(0.0, 1.0);
    const TKernel k(iv, 0.6, g, KernelShape::power_law(), KernelTag::custom);
    // f = 1: the integrand is g'(s) (g(t) - g(s))^{alpha-1} / Gamma(alpha).
    PiecewiseSmoothFn one = constant_fn(1.0);
    for (double t : {0.2, 0.7, 1.0}) {
        const double gt = t + t * t * t / 3.0;
        CHECK(rel_err(j_right(k, one, t), std::pow(gt, 0.6) / std::tgamma(1.6)) < 1e-10);
    }
    const double t = 0.5 + 1e-12;
    const double d = t - 0.5;  // exact
    CHECK(rel_err(k.increment(t, 0.5), d * (1.25 + 0.5 * d + d * d / 3.0)) < 1e-14);
}

TEST_CASE("integer order: RL alpha = 1 is the plain integral") {
    const TKernel k = make_specialization(KernelTag::rl, 1.0, Interval(0.0, 2.0));
    const auto fam = random_ac_family(Interval(0.0, 2.0), 5, 10, false, 4);
    for (const auto& f : fam) {
        const auto fp = f.derivative_fn();
        for (double t : {0.3, 1.1, 2.0})
            CHECK(std::abs(j_right(k, fp, t, 1e-12) - (f(t) - f(0.0))) < 1e-11);
    }
}

TEST_CASE("positivity: f >= 0 gives J f >= 0") {
    std::mt19937_64 rng(606);
    const Interval iv(1.0, 2.5);
    for (KernelTag tag : {KernelTag::rl, KernelTag::hadamard}) {
        for (double alpha : {0.2, 0.7, 1.5}) {
            const TKernel k = make_specialization(tag, alpha, iv);
            const auto fam = random_ac_family(iv, rng(), 5, false, 3);
            for (const auto& f : fam) {
                const auto v = f.value_fn();
                PiecewiseSmoothFn sq([v](double s) { return v(s) * v(s); }, v.breakpoints);
                for (int j = 0; j <= 6; ++j) {
                    const double t = iv.a + iv.length() * j / 6.0;
                    CHECK(j_right(k, sq, t) >= 0.0);
                    CHECK(j_left(k, sq, t) >= 0.0);
                }
            }
        }
    }
}

TEST_CASE("generalized derivative examples") {
    const TKernel rl = make_specialization(KernelTag::rl, 0.5, kUnit);
    for (double t : {0.1, 0.4, 0.75}) {
        CHECK(rel_err(d_right(rl, constant_fn(1.0), t), std::pow(t, -0.5) / std::tgamma(0.5)) < 1e-7);
        CHECK(rel_err(d_left(rl, constant_fn(1.0), t), std::pow(1.0 - t, -0.5) / std::tgamma(0.5)) <
              1e-7);
    }
    for (double alpha : {0.3, 0.7}) {
        const TKernel had = make_specialization(KernelTag::hadamard, alpha, Interval(1.0, 4.0));
        for (double t : {1.5, 2.5, 3.5}) {
            const double want = std::pow(std::log(t), -alpha) / std::tgamma(1.0 - alpha);
            CHECK(rel_err(d_right(had, constant_fn(1.0), t), want) < 1e-7);
        }
    }
    CHECK_THROWS_AS(d_right(rl, constant_fn(1.0), 0.0), DomainError);
    CHECK_THROWS_AS(d_left(rl, constant_fn(1.0), 1.0), DomainError);
    CHECK_THROWS_AS(d_right(make_specialization(KernelTag::rl, 1.0, kUnit), constant_fn(1.0), 0.5),
                    DomainError);
}

TEST_CASE("derivative inverts the integral on smooth functions") {
    // f = J^alpha h in closed form for polynomial h; then D^alpha f should give back h.
    std::mt19937_64 rng(707);
    for (double alpha : {0.25, 0.5, 0.75}) {
        const TKernel k = make_specialization(KernelTag::rl, alpha, kUnit);
        double c[3];
        for (double& x : c) x = -1.0 + 2.0 * unit_uniform(rng());
        PiecewiseSmoothFn f([&](double s) {
            double v = 0.0;
            for (int m = 0; m < 3; ++m)
                v += c[m] * std::tgamma(m + 1.0) / std::tgamma(m + 1.0 + alpha) * std::pow(s, m + alpha);
            return v;
        });
        for (double t : {0.2, 0.5, 0.8}) {
            const double h = c[0] + t * (c[1] + t * c[2]);
            CHECK(std::abs(d_right(k, f, t) - h) < 1e-5);
        }
    }
    // Fully composed numerics: the inner J is itself a quadrature.
    const TKernel k = make_specialization(KernelTag::rl, 0.5, kUnit);
    PiecewiseSmoothFn h([](double s) { return std::cos(2.0 * s); });
    PiecewiseSmoothFn f([&](double s) { return j_right(k, h, s, 1e-13); });
    CHECK(std::abs(d_right(k, f, 0.6, 1e-5) - std::cos(1.2)) < 1e-5);
}

TEST_CASE("in_L1T examples") {
    const TKernel rl = make_specialization(KernelTag::rl, 0.5, kUnit);
    const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
    CHECK(in_L1T(rl, constant_fn(1.0), grid));
    CHECK(in_L1T(rl, constant_fn(0.0), grid));
    PiecewiseSmoothFn blowup([](double s) { return std::pow(s, -2.0); });
    CHECK_FALSE(in_L1T(rl, blowup, grid));
}

TEST_CASE("induced density 1/T(b, s, alpha) has total mass 1/Gamma(alpha + 1) for RL") {
    for (double alpha : {0.25, 0.5, 0.75, 1.0}) {
        const Measure mu(induced_density(make_specialization(KernelTag::rl, alpha, kUnit)));
        CHECK(rel_err(mu.total_mass(), 1.0 / std::tgamma(alpha + 1.0)) < 1e-10);
    }
    // Hadamard on [1, e]: int ds / (Gamma(alpha) s log(e/s)^{1-alpha}) = 1/Gamma(alpha+1).
    const Measure had(induced_density(make_specialization(KernelTag::hadamard, 0.5, Interval(1.0, std::numbers::e))));
    CHECK(rel_err(had.total_mass(), 1.0 / std::tgamma(1.5)) < 1e-9);
}
