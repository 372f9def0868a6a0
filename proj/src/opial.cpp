#include "opial/opial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "opial/errors.hpp"
#include "opial/muckenhoupt.hpp"

namespace opial {

namespace {

struct VariantName {
    Variant variant;
    const char* name;
};

constexpr VariantName kVariantNames[] = {
    {Variant::theorem_two_measure, "theorem_two_measure"},
    {Variant::corollary_one_measure, "corollary_one_measure"},
    {Variant::corollary_p_le_2, "corollary_p_le_2"},
    {Variant::lebesgue_pq, "lebesgue_pq"},
    {Variant::lebesgue_p_le_2, "lebesgue_p_le_2"},
    {Variant::prop_fractional_pq, "prop_fractional_pq"},
    {Variant::prop_fractional_p_le_2, "prop_fractional_p_le_2"},
};

bool is_lebesgue_variant(Variant v) {
    return v == Variant::lebesgue_pq || v == Variant::lebesgue_p_le_2;
}

Measure induced_measure(const std::optional<TKernel>& kernel, bool p_is_1) {
    if (!kernel) throw PreconditionError("fractional variants need a kernel");
    try {
        return Measure(induced_density(*kernel));
    } catch (const DivergenceError&) {
        throw HypothesisFailure(std::string("weight ds/T(b,s,alpha) is not integrable") +
                                (p_is_1 ? " (required by the p = 1 form)" : ""));
    } catch (const DomainError&) {
        throw HypothesisFailure(std::string("weight ds/T(b,s,alpha) is not integrable") +
                                (p_is_1 ? " (required by the p = 1 form)" : ""));
    }
}

double ratio_of(double lhs, double rhs) {
    if (rhs == 0.0) return lhs == 0.0 ? 0.0 : kInf;
    if (rhs == kInf) return 0.0;
    return lhs / rhs;
}

}  // namespace

std::string to_string(Variant v) {
    for (const auto& vn : kVariantNames)
        if (vn.variant == v) return vn.name;
    return "unknown";
}

std::optional<Variant> parse_variant(const std::string& name) {
    for (const auto& vn : kVariantNames)
        if (name == vn.name) return vn.variant;
    return std::nullopt;
}

bool is_p_le_2(Variant v) {
    return v == Variant::corollary_p_le_2 || v == Variant::lebesgue_p_le_2 ||
           v == Variant::prop_fractional_p_le_2;
}

bool is_fractional(Variant v) {
    return v == Variant::prop_fractional_pq || v == Variant::prop_fractional_p_le_2;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "true";
        case Verdict::violated: return "false";
        case Verdict::vacuous: return "vacuous";
        case Verdict::hypothesis_failure: return "hypothesis_failure";
    }
    return "false";
}

OpialProblem OpialProblem::fractional(ACFunction f, const TKernel& kernel, ExponentPair pq,
                                      Variant variant) {
    const Measure mu = induced_measure(kernel, pq.p == 1.0);
    return {std::move(f), mu, mu, pq, variant, kernel};
}

double lebesgue_pq_constant(double length, const ExponentPair& pq) {
    const double p = pq.p;
    const double q = pq.q;
    if (p == 1.0) return std::pow(length, 1.0 / q);
    const double s = 1.0 / q + (p - 1.0) / p;
    return std::pow(length / s, s) * std::pow(q * (p - 1.0) / (p * (q - 1.0)), (p - 1.0) / p);
}

double lebesgue_p_le_2_constant(double length, double p) {
    if (!(p >= 1.0 && p <= 2.0)) throw DomainError("the p <= 2 form needs 1 <= p <= 2");
    if (p == 1.0) return 1.0;
    return std::pow(p * length / (2.0 * std::sqrt(p - 1.0)), 2.0 * (p - 1.0) / p);
}

OpialVerifier::OpialVerifier(Variant variant, Measure mu0, Measure mu1, ExponentPair pq,
                             std::optional<TKernel> kernel, double tol)
    : variant_(variant), mu0_(std::move(mu0)), mu1_(std::move(mu1)), pq_(pq), tol_(tol) {
    if (!(tol_ > 0.0)) throw DomainError("tol must be > 0");
    const double p = pq_.p;
    if (is_p_le_2(variant_) && p > 2.0) throw DomainError("the p <= 2 variants need 1 <= p <= 2");
    if (mu0_.charges_b()) throw PreconditionError("no_mass_at_b: mu0 must not charge b");

    if (is_fractional(variant_)) {
        mu0_ = induced_measure(kernel, p == 1.0);
        mu1_ = mu0_;
    } else if (variant_ != Variant::theorem_two_measure) {
        mu1_ = mu0_;
    }
    if (is_lebesgue_variant(variant_) && (!mu0_.density().is_lebesgue() || !mu0_.atoms().empty()))
        throw PreconditionError("lebesgue variants need plain Lebesgue measure");

    const double len = mu0_.interval().length();
    if (is_p_le_2(variant_)) {
        // Squared L^p norm of f'.
        norm1_exp_ = p;
        norm2_exp_ = 0.0;
        if (variant_ == Variant::lebesgue_p_le_2) {
            B_ = p == 1.0 ? 1.0 : power_product_sup(mu0_.interval(), (p - 1.0) / p, (p - 1.0) / p).first;
            constant_ = lebesgue_p_le_2_constant(len, p);
        } else {
            B_ = muckenhoupt_sup(mu0_, mu1_, p, (p - 1.0) / p, tol_).value;
            constant_ = p == 1.0 ? B_ : B_ * std::pow(p * p / (p - 1.0), (p - 1.0) / p);
        }
    } else {
        norm1_exp_ = p;
        norm2_exp_ = pq_.q_dual;
        if (variant_ == Variant::lebesgue_pq) {
            B_ = lebesgue_B_closed_form(mu0_.interval(), pq_);
            constant_ = lebesgue_pq_constant(len, pq_);
        } else {
            B_ = compute_B(mu0_, mu1_, pq_, tol_).B;
            constant_ = muckenhoupt_C(B_, pq_);
        }
    }
}

OpialVerifier::OpialVerifier(const OpialProblem& problem, double tol)
    : OpialVerifier(problem.variant, problem.mu0, problem.mu1, problem.pq, problem.kernel, tol) {}

OpialReport OpialVerifier::evaluate(const ACFunction& f) const {
    if (f.value_at_a() != 0.0) throw PreconditionError("Opial inequalities need f(a) = 0");
    if (f.interval().a != interval().a || f.interval().b != interval().b)
        throw DomainError("function and measures live on different intervals");

    OpialReport r{variant_, pq_, 0, 0, 0, 0, 0, false, Verdict::holds, 0, {}};
    r.B = B_;
    r.constant = constant_;

    const auto fp = f.derivative_fn();
    const PiecewiseSmoothFn ffp([f](double x) { return f(x) * f.derivative(x); }, f.breakpoints());
    const auto lhs = lp_norm_with_error(ffp, 1.0, mu0_, tol_);
    r.lhs = lhs.value;

    if (!(B_ < kInf)) {
        r.rhs = kInf;
        r.ratio = 0.0;
        r.verdict = Verdict::hypothesis_failure;
        r.diagnosis = "B is infinite";
        r.err_estimate = lhs.error;
        return r;
    }

    quad::QuadResult n1 = lp_norm_with_error(fp, norm1_exp_, mu1_, tol_);
    quad::QuadResult n2{};
    double rhs_rel_err = 0.0;
    if (norm2_exp_ == 0.0) {
        // Squared form.
        r.rhs = product_zero_wins(constant_, n1.value * n1.value);
        if (n1.value > 0.0) rhs_rel_err = 2.0 * n1.error / n1.value;
    } else {
        n2 = lp_norm_with_error(fp, norm2_exp_, mu0_, tol_);
        r.rhs = product_zero_wins(constant_, product_zero_wins(n1.value, n2.value));
        if (n1.value > 0.0) rhs_rel_err += n1.error / n1.value;
        if (n2.value > 0.0 && n2.value < kInf) rhs_rel_err += n2.error / n2.value;
    }
    r.err_estimate = lhs.error + (r.rhs < kInf ? r.rhs * rhs_rel_err : 0.0);
    r.ratio = ratio_of(r.lhs, r.rhs);

    if (r.rhs == kInf) {
        r.verdict = Verdict::vacuous;
        r.diagnosis = "a norm of f' on the right is infinite";
    } else if (r.rhs == 0.0 && r.lhs > 0.0) {
        r.verdict = Verdict::hypothesis_failure;
        r.diagnosis = "rhs vanishes while lhs > 0";
    } else if (r.lhs <= r.rhs * (1.0 + kVerificationSlack)) {
        r.verdict = Verdict::holds;
    } else {
        r.verdict = Verdict::violated;
        r.diagnosis = "lhs exceeds rhs beyond the verification slack";
    }
    r.holds = r.verdict == Verdict::holds;
    return r;
}

OpialReport OpialVerifier::verify(const ACFunction& f) const {
    if (!hypotheses_hold())
        throw HypothesisFailure("B is infinite for variant " + to_string(variant_));
    return evaluate(f);
}

OpialReport verify(const OpialProblem& problem, double tol) {
    return OpialVerifier(problem, tol).verify(problem.f);
}

namespace {

OpialReport verify_as(const OpialProblem& problem, double tol, std::initializer_list<Variant> allowed,
                      const char* what) {
    if (std::find(allowed.begin(), allowed.end(), problem.variant) == allowed.end())
        throw DomainError(std::string(what) + " does not cover variant " + to_string(problem.variant));
    return verify(problem, tol);
}

}  // namespace

OpialReport verify_theorem(const OpialProblem& problem, double tol) {
    return verify_as(problem, tol, {Variant::theorem_two_measure}, "verify_theorem");
}

OpialReport verify_corollary_one_measure(const OpialProblem& problem, double tol) {
    return verify_as(problem, tol, {Variant::corollary_one_measure}, "verify_corollary_one_measure");
}

OpialReport verify_corollary_p_le_2(const OpialProblem& problem, double tol) {
    return verify_as(problem, tol, {Variant::corollary_p_le_2}, "verify_corollary_p_le_2");
}

OpialReport verify_lebesgue(const OpialProblem& problem, double tol) {
    return verify_as(problem, tol, {Variant::lebesgue_pq, Variant::lebesgue_p_le_2}, "verify_lebesgue");
}

OpialReport verify_prop_fractional(const OpialProblem& problem, double tol) {
    return verify_as(problem, tol, {Variant::prop_fractional_pq, Variant::prop_fractional_p_le_2},
                     "verify_prop_fractional");
}

ACFunction piecewise_linear_derivative(Interval interval, std::span<const double> nodes) {
    if (nodes.size() < 2) throw DomainError("need at least two derivative nodes");
    const std::size_t pieces = nodes.size() - 1;
    std::vector<double> knots(pieces + 1);
    std::vector<std::vector<double>> coeffs;
    const double h = interval.length() / static_cast<double>(pieces);
    for (std::size_t i = 0; i <= pieces; ++i) knots[i] = interval.a + h * static_cast<double>(i);
    knots.back() = interval.b;
    for (std::size_t i = 0; i < pieces; ++i)
        coeffs.push_back({nodes[i], (nodes[i + 1] - nodes[i]) / (knots[i + 1] - knots[i])});
    return ACFunction(PiecewisePolynomial(std::move(knots), std::move(coeffs)), 0.0);
}

namespace {

double checked_ratio(const OpialVerifier& v, const ACFunction& f) {
    const OpialReport r = v.evaluate(f);
    if (r.verdict == Verdict::vacuous || r.verdict == Verdict::hypothesis_failure) return 0.0;
    if (r.ratio > 1.0 + kVerificationSlack)
        throw InvariantViolation("sharpness ratio " + std::to_string(r.ratio) +
                                 " exceeds 1 + slack for variant " + to_string(v.variant()));
    return r.ratio;
}

}  // namespace

SharpnessResult sharpness_search(const OpialVerifier& verifier, std::span<const ACFunction> family) {
    if (family.empty()) throw DomainError("sharpness family is empty");
    if (!verifier.hypotheses_hold()) throw HypothesisFailure("B is infinite; nothing to sharpen");
    SharpnessResult best{-1.0, family.front(), 0};
    for (const ACFunction& f : family) {
        const double r = checked_ratio(verifier, f);
        ++best.evaluations;
        if (r > best.best_ratio) {
            best.best_ratio = r;
            best.witness = f;
        }
    }
    return best;
}

SharpnessResult sharpness_search(const OpialVerifier& verifier, const SharpnessOptions& opts) {
    if (opts.budget < 1) throw DomainError("sharpness budget must be >= 1");
    if (opts.pieces < 1) throw DomainError("sharpness needs at least one piece");
    if (!verifier.hypotheses_hold()) throw HypothesisFailure("B is infinite; nothing to sharpen");

    const Interval iv = verifier.interval();
    const std::size_t dim = static_cast<std::size_t>(opts.pieces) + 1;
    using Point = std::vector<double>;

    std::vector<double> start(dim, 1.0);
    SharpnessResult best{-1.0, piecewise_linear_derivative(iv, start), 0};
    int evals = 0;
    auto objective = [&](const Point& x) {
        const ACFunction f = piecewise_linear_derivative(iv, x);
        const double r = checked_ratio(verifier, f);
        ++evals;
        if (r > best.best_ratio) {
            best.best_ratio = r;
            best.witness = f;
        }
        return -r;
    };

    std::mt19937_64 rng(opts.seed);
    Point x0 = start;
    while (evals < opts.budget) {
        // Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
        std::vector<Point> simplex{x0};
        for (std::size_t i = 0; i < dim; ++i) {
            Point y = x0;
            y[i] += 0.5 * std::max(1.0, std::abs(x0[i]));
            simplex.push_back(std::move(y));
        }
        std::vector<double> fv;
        for (const Point& s : simplex) {
            if (evals >= opts.budget) break;
            fv.push_back(objective(s));
        }
        if (fv.size() < simplex.size()) break;
        std::vector<std::size_t> order(simplex.size());
        while (evals < opts.budget) {
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return fv[i] < fv[j]; });
            const std::size_t lo = order.front();
            const std::size_t hi = order.back();
            const std::size_t second = order[order.size() - 2];
            double size = 0.0;
            for (const Point& s : simplex)
                for (std::size_t i = 0; i < dim; ++i) size = std::max(size, std::abs(s[i] - simplex[lo][i]));
            double scale = 0.0;
            for (double v : simplex[lo]) scale = std::max(scale, std::abs(v));
            if (fv[hi] - fv[lo] <= 1e-13 && size <= 1e-9 * std::max(1.0, scale)) break;

            Point centroid(dim, 0.0);
            for (std::size_t k = 0; k + 1 < order.size(); ++k)
                for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[order[k]][i] / static_cast<double>(dim);
            auto along = [&](double t) {
                Point y(dim);
                for (std::size_t i = 0; i < dim; ++i) y[i] = centroid[i] + t * (simplex[hi][i] - centroid[i]);
                return y;
            };
            const Point xr = along(-1.0);
            const double fr = objective(xr);
            if (fr < fv[lo]) {
                if (evals >= opts.budget) break;
                const Point xe = along(-2.0);
                const double fe = objective(xe);
                if (fe < fr) {
                    simplex[hi] = xe;
                    fv[hi] = fe;
                } else {
                    simplex[hi] = xr;
                    fv[hi] = fr;
                }
            } else if (fr < fv[second]) {
                simplex[hi] = xr;
                fv[hi] = fr;
            } else {
                if (evals >= opts.budget) break;
                const bool outside = fr < fv[hi];
                const Point xc = along(outside ? -0.5 : 0.5);
                const double fc = objective(xc);
                if (fc < (outside ? fr : fv[hi])) {
                    simplex[hi] = xc;
                    fv[hi] = fc;
                } else {
                    for (std::size_t k = 0; k < simplex.size() && evals < opts.budget; ++k) {
                        if (k == lo) continue;
                        for (std::size_t i = 0; i < dim; ++i)
                            simplex[k][i] = simplex[lo][i] + 0.5 * (simplex[k][i] - simplex[lo][i]);
                        fv[k] = objective(simplex[k]);
                    }
                }
            }
        }
        // Random restart.
        for (double& v : x0) v = -1.0 + 2.0 * unit_uniform(rng());
    }
    best.evaluations = evals;
    return best;
}

}  // namespace opial
