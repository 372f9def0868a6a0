#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "opial/interval.hpp"

namespace opial {

/// Piecewise polynomial on [a, b]. Piece i lives on [x_i, x_{i+1}] and is stored in the
/// local variable (x - x_i): p_i(x) = sum_k c_{i,k} (x - x_i)^k.
class PiecewisePolynomial {
public:
    /// `knots` are x_0 = a < x_1 < ... < x_n = b; `coefficients` has n entries.
    PiecewisePolynomial(std::vector<double> knots, std::vector<std::vector<double>> coefficients);

    static PiecewisePolynomial single(Interval interval, std::vector<double> coefficients);

    Interval interval() const { return {knots_.front(), knots_.back()}; }
    std::size_t piece_count() const noexcept { return coeffs_.size(); }
    const std::vector<double>& knots() const noexcept { return knots_; }
    const std::vector<std::vector<double>>& coefficients() const noexcept { return coeffs_; }
    /// Interior knots x_1 .. x_{n-1}.
    std::vector<double> interior_knots() const;
    std::size_t max_degree() const noexcept;

    /// Value using the piece whose half-open span [x_i, x_{i+1}) contains x (the last piece
    /// is closed). At an interior knot this is the right limit.
    double operator()(double x) const;
    double piece_value(std::size_t piece, double x) const;
    double left_limit(std::size_t knot) const;   ///< knot in 1..n
    double right_limit(std::size_t knot) const;  ///< knot in 0..n-1

    /// Exact integral from a to x.
    double integral_from_start(double x) const;

private:
    std::size_t locate(double x) const;

    std::vector<double> knots_;
    std::vector<std::vector<double>> coeffs_;
    std::vector<double> cumulative_;  // integral from a to x_i
};

}  // namespace opial
