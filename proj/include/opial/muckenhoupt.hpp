#pragma once

#include <optional>
#include <utility>

#include "opial/interval.hpp"
#include "opial/measure.hpp"

namespace opial {

struct MuckenhouptConstants {
    double B = 0.0;
    double C = 0.0;
    /// Location of the supremum when it is attained inside (a, b).
    std::optional<double> argmax_x;
    ExponentPair pq;
};

/// Result of the supremum search behind B.
struct SupResult {
    double value = 0.0;
    std::optional<double> argmax;
};

inline constexpr int kSupGridPoints = 2049;

/// sup over a < x < b of mu0([x, b))^tail_exponent * ||1/w1||_{L^{1/(p-1)}([a,x])}^{1/p},
/// w1 the density of mu1 (atoms of mu1 do not enter), with 0 * inf = 0. Returns +inf when
/// the product is infinite somewhere or keeps growing toward b.
/// Throws PreconditionError if mu0 charges {b}.
SupResult muckenhoupt_sup(const Measure& mu0, const Measure& mu1, double p,
                          double tail_exponent, double tol = 1e-10);

/// B with tail exponent 1/q, and C from it.
MuckenhouptConstants compute_B(const Measure& mu0, const Measure& mu1, const ExponentPair& pq,
                               double tol = 1e-10);

/// C = B (q/(q-1))^{(p-1)/p} q^{1/q} for p > 1, C = B for p = 1.
double muckenhoupt_C(double B, const ExponentPair& pq);

/// sup of (b-x)^alpha (x-a)^beta over [a, b] and where it is reached.
std::pair<double, double> power_product_sup(Interval interval, double alpha_exp, double beta_exp);

/// B for Lebesgue measure: (b-a)^{1/q} for p = 1, else the power-product supremum with
/// alpha = 1/q, beta = (p-1)/p.
double lebesgue_B_closed_form(Interval interval, const ExponentPair& pq);

}  // namespace opial
