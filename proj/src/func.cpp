#include "opial/func.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "opial/errors.hpp"

namespace opial {

namespace {

std::vector<double> rule_values(const PiecewisePolynomial& d, BreakpointRule rule) {
    std::vector<double> v;
    for (std::size_t k = 1; k + 1 < d.knots().size(); ++k)
        v.push_back(rule == BreakpointRule::right_limit ? d.right_limit(k) : d.left_limit(k));
    return v;
}

}  // namespace

ACFunction::ACFunction(PiecewisePolynomial derivative, double value_at_a, BreakpointRule rule)
    : ACFunction(derivative, value_at_a, rule_values(derivative, rule)) {}

ACFunction::ACFunction(PiecewisePolynomial derivative, double value_at_a,
                       std::vector<double> breakpoint_values)
    : derivative_(std::move(derivative)),
      value_at_a_(value_at_a),
      breakpoint_values_(std::move(breakpoint_values)) {
    if (derivative_.max_degree() > kMaxDegree)
        throw DomainError("derivative pieces are limited to degree 3");
    if (!std::isfinite(value_at_a_)) throw DomainError("value_at_a must be finite");
    if (breakpoint_values_.size() + 2 != derivative_.knots().size())
        throw DomainError("one derivative value is required per interior breakpoint");
}

double ACFunction::operator()(double x) const {
    const Interval iv = interval();
    if (!iv.contains(x)) throw DomainError("AC function evaluated outside [a, b]");
    return value_at_a_ + derivative_.integral_from_start(x);
}

double ACFunction::derivative(double x) const {
    const auto& knots = derivative_.knots();
    auto it = std::lower_bound(knots.begin() + 1, knots.end() - 1, x);
    if (it != knots.end() - 1 && *it == x)
        return breakpoint_values_[static_cast<std::size_t>(it - knots.begin()) - 1];
    return derivative_(x);
}

ACFunction ACFunction::with_breakpoint_values(std::vector<double> values) const {
    return ACFunction(derivative_, value_at_a_, std::move(values));
}

ACFunction ACFunction::with_breakpoint_rule(BreakpointRule rule) const {
    return ACFunction(derivative_, value_at_a_, rule);
}

PiecewiseSmoothFn ACFunction::value_fn() const {
    return {[f = *this](double x) { return f(x); }, breakpoints()};
}

PiecewiseSmoothFn ACFunction::derivative_fn() const {
    return {[f = *this](double x) { return f.derivative(x); }, breakpoints()};
}

double unit_uniform(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::vector<ACFunction> random_ac_family(Interval interval, std::uint64_t seed, int count,
                                         bool zero_at_a, int piece_budget) {
    if (count < 1) throw DomainError("random_ac_family needs count >= 1");
    if (piece_budget < 1) throw DomainError("random_ac_family needs piece_budget >= 1");
    std::mt19937_64 rng(seed);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng()); };
    const double len = interval.length();

    std::vector<ACFunction> family;
    family.reserve(static_cast<std::size_t>(count));
    for (int n = 0; n < count; ++n) {
        const int pieces = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(piece_budget));
        std::vector<double> knots{interval.a, interval.b};
        while (static_cast<int>(knots.size()) < pieces + 1) {
            const double x = interval.a + len * uniform(0.05, 0.95);
            const bool crowded = std::any_of(knots.begin(), knots.end(), [&](double k) {
                return std::abs(k - x) < 0.02 * len;
            });
            if (!crowded) knots.push_back(x);
        }
        std::sort(knots.begin(), knots.end());
        std::vector<std::vector<double>> coeffs;
        for (int i = 0; i < pieces; ++i) {
            const int degree = 1 + static_cast<int>(rng() % 2);
            std::vector<double> c;
            for (int k = 0; k <= degree; ++k) c.push_back(uniform(-2.0, 2.0) / std::pow(len, k));
            coeffs.push_back(std::move(c));
        }
        const double f_a = zero_at_a ? 0.0 : uniform(-1.0, 1.0);
        family.emplace_back(PiecewisePolynomial(std::move(knots), std::move(coeffs)), f_a);
    }
    return family;
}

}  // namespace opial
