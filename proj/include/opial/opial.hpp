#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opial/func.hpp"
#include "opial/measure.hpp"
#include "opial/operators.hpp"

namespace opial {

/// Relative slack allowed on lhs <= rhs, covering quadrature and supremum-search error.
inline constexpr double kVerificationSlack = 1e-6;

enum class Variant {
    theorem_two_measure,     ///< two measures, constant C
    corollary_one_measure,   ///< mu0 = mu1
    corollary_p_le_2,        ///< mu0 = mu1, 1 <= p <= 2, squared L^p norm
    lebesgue_pq,             ///< closed-form constant on Lebesgue measure
    lebesgue_p_le_2,         ///< closed-form constant on Lebesgue measure, 1 <= p <= 2
    prop_fractional_pq,      ///< weight ds / T(b, s, alpha)
    prop_fractional_p_le_2,  ///< weight ds / T(b, s, alpha), 1 <= p <= 2
};

std::string to_string(Variant v);
std::optional<Variant> parse_variant(const std::string& name);
bool is_p_le_2(Variant v);
bool is_fractional(Variant v);

enum class Verdict { holds, violated, vacuous, hypothesis_failure };

std::string to_string(Verdict v);

struct OpialProblem {
    ACFunction f;
    Measure mu0;
    Measure mu1;
    ExponentPair pq;
    Variant variant;
    std::optional<TKernel> kernel;

    /// Problem on the induced measure ds / T(b, s, alpha) of `kernel`.
    static OpialProblem fractional(ACFunction f, const TKernel& kernel, ExponentPair pq,
                                   Variant variant);
};

struct OpialReport {
    Variant variant;
    ExponentPair pq;
    double lhs = 0.0;
    double rhs = 0.0;
    double B = 0.0;
    /// Full multiplier on the norm product.
    double constant = 0.0;
    /// lhs / rhs, 0 when both vanish.
    double ratio = 0.0;
    bool holds = false;
    Verdict verdict = Verdict::holds;
    double err_estimate = 0.0;
    std::string diagnosis;
};

/// Precomputes B and the constant of one (variant, measures, exponents) setup so many
/// functions can be checked against it.
///
/// Corollary variants read mu0 only. Fractional variants replace both measures by the
/// measure induced by the kernel. In the 1 <= p <= 2 variants q plays no role.
class OpialVerifier {
public:
    OpialVerifier(Variant variant, Measure mu0, Measure mu1, ExponentPair pq,
                  std::optional<TKernel> kernel = std::nullopt, double tol = 1e-10);
    explicit OpialVerifier(const OpialProblem& problem, double tol = 1e-10);

    Variant variant() const noexcept { return variant_; }
    const ExponentPair& pq() const noexcept { return pq_; }
    const Measure& mu0() const noexcept { return mu0_; }
    const Measure& mu1() const noexcept { return mu1_; }
    const Interval& interval() const noexcept { return mu0_.interval(); }
    double B() const noexcept { return B_; }
    double constant() const noexcept { return constant_; }
    /// B < inf.
    bool hypotheses_hold() const noexcept { return B_ < kInf; }

    /// Both sides for f. Never throws on a failed hypothesis; the verdict says so.
    /// Throws PreconditionError unless f(a) = 0.
    OpialReport evaluate(const ACFunction& f) const;
    /// As evaluate, but B = inf raises HypothesisFailure.
    OpialReport verify(const ACFunction& f) const;

private:
    Variant variant_;
    Measure mu0_;
    Measure mu1_;
    ExponentPair pq_;
    double tol_;
    double B_ = 0.0;
    double constant_ = 0.0;
    /// Exponents of the two norms of f' on the right; 0 marks the squared-norm form.
    double norm1_exp_ = 0.0;
    double norm2_exp_ = 0.0;
};

OpialReport verify(const OpialProblem& problem, double tol = 1e-10);
OpialReport verify_theorem(const OpialProblem& problem, double tol = 1e-10);
OpialReport verify_corollary_one_measure(const OpialProblem& problem, double tol = 1e-10);
OpialReport verify_corollary_p_le_2(const OpialProblem& problem, double tol = 1e-10);
OpialReport verify_lebesgue(const OpialProblem& problem, double tol = 1e-10);
OpialReport verify_prop_fractional(const OpialProblem& problem, double tol = 1e-10);

/// Closed-form constants on Lebesgue measure over an interval of the given length.
double lebesgue_pq_constant(double length, const ExponentPair& pq);
double lebesgue_p_le_2_constant(double length, double p);

struct SharpnessOptions {
    int budget = 500;        ///< ratio evaluations
    std::uint64_t seed = 0;
    int pieces = 6;          ///< uniform pieces of the piecewise-linear f'
};

struct SharpnessResult {
    double best_ratio = 0.0;
    ACFunction witness;
    int evaluations = 0;
};

/// Maximizes the ratio over f with continuous piecewise-linear f' and f(a) = 0, by
/// Nelder-Mead on the node values of f' with seeded random restarts. The first start is
/// f' = 1. Throws HypothesisFailure when B = inf and InvariantViolation if a ratio exceeds
/// 1 + kVerificationSlack.
SharpnessResult sharpness_search(const OpialVerifier& verifier, const SharpnessOptions& opts);

/// Best ratio over an explicit family.
SharpnessResult sharpness_search(const OpialVerifier& verifier,
                                 std::span<const ACFunction> family);

/// f with f(a) = 0 and f' the continuous piecewise-linear interpolant of `nodes` on a
/// uniform partition of the interval.
ACFunction piecewise_linear_derivative(Interval interval, std::span<const double> nodes);

}  // namespace opial
