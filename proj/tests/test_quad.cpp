#include <cmath>
#include <numbers>

#include "doctest.h"
#include "opial/errors.hpp"
#include "opial/quad.hpp"

using namespace opial;
using namespace opial::quad;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_CASE("gamma_fn reference values") {
    CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rel_err(gamma_fn(0.5), std::sqrt(std::numbers::pi)) < 1e-13);
    CHECK(gamma_fn(4.0) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
    CHECK_THROWS_AS(gamma_fn(-1.5), DomainError);
    CHECK(rel_err(beta_fn(2.0, 0.5), 4.0 / 3.0) < 1e-13);
}

TEST_CASE("gauss_legendre integrates polynomials exactly") {
    const GaussRule rule = gauss_legendre(8);
    double sum_w = 0.0;
    double m14 = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum_w += rule.weights[i];
        m14 += rule.weights[i] * std::pow(rule.nodes[i], 14);
    }
    CHECK(sum_w == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(m14 == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("constant smooth factor against a power weight matches (b-a)^alpha/alpha") {
    for (double alpha : {0.25, 0.5, 0.75, 0.9}) {
        for (SingularEnd end : {SingularEnd::left, SingularEnd::right}) {
            SingularIntegralSpec spec{Interval(0.3, 1.7), end, alpha - 1.0,
                                      [](double) { return 1.0; }, {}, {}};
            const QuadResult r = integrate_endpoint_singular(spec, 1e-10);
            const double want = std::pow(1.4, alpha) / alpha;
            CAPTURE(alpha);
            CHECK(rel_err(r.value, want) < 1e-10);
            CHECK(std::abs(r.value - want) <= std::max(r.error, 1e-10 * std::abs(r.value)));
        }
    }
}

TEST_CASE("zero exponent is an ordinary integral") {
    SingularIntegralSpec spec{Interval(-1.0, 2.0), SingularEnd::right, 0.0,
                              [](double) { return 1.0; }, {}, {}};
    CHECK(integrate_endpoint_singular(spec).value == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("s (1-s)^(-1/2) on [0,1] equals Beta(2,1/2) = 4/3") {
    SingularIntegralSpec spec{Interval(0.0, 1.0), SingularEnd::right, -0.5,
                              [](double s) { return s; }, {}, {}};
    CHECK(rel_err(integrate_endpoint_singular(spec).value, 4.0 / 3.0) < 1e-12);
}

TEST_CASE("cubic smooth factors match the Beta-identity closed form term by term") {
    // integral_0^1 (sum c_k s^k) (1-s)^lambda ds = sum c_k B(k+1, lambda+1)
    const double c[4] = {0.7, -1.3, 2.1, 0.4};
    for (double lambda : {-0.9, -0.5, -0.1, 0.35}) {
        auto phi = [&](double s) { return c[0] + s * (c[1] + s * (c[2] + s * c[3])); };
        SingularIntegralSpec spec{Interval(0.0, 1.0), SingularEnd::right, lambda, phi, {}, {}};
        double want = 0.0;
        for (int k = 0; k < 4; ++k) want += c[k] * beta_fn(k + 1.0, lambda + 1.0);
        CAPTURE(lambda);
        CHECK(std::abs(integrate_endpoint_singular(spec).value - want) < 1e-12);
    }
}

TEST_CASE("halving tol never increases the error estimate") {
    for (double alpha : {0.25, 0.6}) {
        auto phi = [](double s) { return std::exp(s) * std::cos(3.0 * s); };
        double prev = INFINITY;
        for (double tol = 1e-4; tol >= 1e-12; tol /= 2.0) {
            SingularIntegralSpec spec{Interval(0.0, 2.0), SingularEnd::left, alpha - 1.0, phi,
                                      {}, {}};
            const QuadResult r = integrate_endpoint_singular(spec, tol);
            CHECK(r.error <= prev);
            prev = r.error;
        }
    }
}

TEST_CASE("substitution weight multiplies the smooth factor") {
    // integral_1^2 2s (2-s)^(-1/2) ds = 20/3
    SingularIntegralSpec spec{Interval(1.0, 2.0), SingularEnd::right, -0.5,
                              [](double) { return 1.0; }, {}, [](double s) { return 2.0 * s; }};
    CHECK(rel_err(integrate_endpoint_singular(spec).value, 20.0 / 3.0) < 1e-12);
}

TEST_CASE("breakpoints in the smooth factor are respected") {
    // phi = |s - 0.4| on [0,1] with (1-s)^(-1/2)
    auto phi = [](double s) { return std::abs(s - 0.4); };
    SingularIntegralSpec spec{Interval(0.0, 1.0), SingularEnd::right, -0.5, phi, {0.4}, {}};
    // Oracle: split at 0.4 and use antiderivatives in u = 1 - s.
    // integral (0.4 - s)(1-s)^-1/2 over [0,0.4] + (s - 0.4)(1-s)^-1/2 over [0.4,1]
    auto F = [](double u) {  // antiderivative in u of (u - 0.6) u^-1/2 = (2/3)u^1.5 - 1.2 u^0.5
        return (2.0 / 3.0) * std::pow(u, 1.5) - 1.2 * std::sqrt(u);
    };
    const double part1 = F(1.0) - F(0.6);        // s in [0,0.4] -> u in [0.6,1], sign (u-0.6)
    const double part2 = -(F(0.6) - F(0.0));      // s in [0.4,1] -> u in [0,0.6], sign (0.6-u)
    CHECK(rel_err(integrate_endpoint_singular(spec).value, part1 + part2) < 1e-12);
}

TEST_CASE("power weight with the singular point outside the range") {
    auto one = [](double) { return 1.0; };
    const QuadResult r = integrate_power_weighted(one, 0.0, 0.9, 1.0, -0.5);
    CHECK(rel_err(r.value, 2.0 * (1.0 - std::sqrt(0.1))) < 1e-12);
    const double hi = 1.0 - 1e-12;
    const QuadResult near = integrate_power_weighted(one, 0.0, hi, 1.0, -0.75);
    CHECK(rel_err(near.value, 4.0 * (1.0 - std::pow(1.0 - hi, 0.25))) < 1e-11);
}

TEST_CASE("divergent and non-convergent integrals raise the documented errors") {
    SingularIntegralSpec spec{Interval(0.0, 1.0), SingularEnd::left, -1.0,
                              [](double) { return 1.0; }, {}, {}};
    CHECK_THROWS_AS(integrate_endpoint_singular(spec), DivergenceError);
    CHECK_THROWS_AS(integrate_adaptive([](double s) { return 1.0 / s; }, 0.0, 1.0),
                    ConvergenceFailure);
    CHECK_THROWS_AS(integrate_adaptive([](double) { return NAN; }, 0.0, 1.0), EvaluationError);
    try {
        integrate_adaptive([](double s) { return s > 0.5 ? INFINITY : 1.0; }, 0.0, 1.0);
        FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
        CHECK(e.abscissa() > 0.5);
    }
}

TEST_CASE("adaptive Gauss-Kronrod on smooth integrands") {
    const QuadResult r = integrate_adaptive([](double x) { return std::sin(x); }, 0.0,
                                            std::numbers::pi);
    CHECK(rel_err(r.value, 2.0) < 1e-13);
    const double breaks[] = {0.3};
    const QuadResult kink =
        integrate_adaptive([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, breaks);
    CHECK(rel_err(kink.value, 0.5 * (0.09 + 0.49)) < 1e-14);
    CHECK(integrate_adaptive([](double) { return 0.0; }, 0.0, 1.0).value == 0.0);
}
