#include "opial/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "opial/errors.hpp"

namespace opial {

namespace {

double horner(const std::vector<double>& c, double u) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
    return acc;
}

double antiderivative(const std::vector<double>& c, double u) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * u + c[k] / static_cast<double>(k + 1);
    return acc * u;
}

}  // namespace

PiecewisePolynomial::PiecewisePolynomial(std::vector<double> knots,
                                         std::vector<std::vector<double>> coefficients)
    : knots_(std::move(knots)), coeffs_(std::move(coefficients)) {
    if (knots_.size() < 2 || coeffs_.size() + 1 != knots_.size())
        throw DomainError("piecewise polynomial needs n+1 knots for n pieces");
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
        if (!(knots_[i] < knots_[i + 1]) || !std::isfinite(knots_[i + 1]))
            throw DomainError("piecewise polynomial knots must be finite and strictly increasing");
    for (const auto& c : coeffs_)
        for (double v : c)
            if (!std::isfinite(v)) throw DomainError("piecewise polynomial coefficient not finite");
    cumulative_.resize(knots_.size(), 0.0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        cumulative_[i + 1] = cumulative_[i] + antiderivative(coeffs_[i], knots_[i + 1] - knots_[i]);
}

PiecewisePolynomial PiecewisePolynomial::single(Interval interval,
                                                std::vector<double> coefficients) {
    return PiecewisePolynomial({interval.a, interval.b}, {std::move(coefficients)});
}

std::vector<double> PiecewisePolynomial::interior_knots() const {
    return {knots_.begin() + 1, knots_.end() - 1};
}

std::size_t PiecewisePolynomial::max_degree() const noexcept {
    std::size_t d = 0;
    for (const auto& c : coeffs_) d = std::max(d, c.empty() ? std::size_t{0} : c.size() - 1);
    return d;
}

std::size_t PiecewisePolynomial::locate(double x) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    std::size_t idx = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
    return std::min(idx, coeffs_.size() - 1);
}

double PiecewisePolynomial::operator()(double x) const {
    const std::size_t i = locate(x);
    return horner(coeffs_[i], x - knots_[i]);
}

double PiecewisePolynomial::piece_value(std::size_t piece, double x) const {
    return horner(coeffs_.at(piece), x - knots_.at(piece));
}

double PiecewisePolynomial::left_limit(std::size_t knot) const {
    return piece_value(knot - 1, knots_.at(knot));
}

double PiecewisePolynomial::right_limit(std::size_t knot) const {
    return piece_value(knot, knots_.at(knot));
}

double PiecewisePolynomial::integral_from_start(double x) const {
    const std::size_t i = locate(x);
    return cumulative_[i] + antiderivative(coeffs_[i], x - knots_[i]);
}

}  // namespace opial
