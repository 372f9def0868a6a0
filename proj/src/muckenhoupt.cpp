#include "opial/muckenhoupt.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "opial/errors.hpp"

namespace opial {

namespace {

constexpr double kGolden = 0.6180339887498949;
constexpr int kFirstProbe = 12;
constexpr int kLastProbe = 50;

class Product {
public:
    Product(const Measure& mu0, const Measure& mu1, double p, double e, double tol)
        : mu0_(mu0), mu1_(mu1), p_(p), e_(e), tol_(tol) {}

    double combine(double tail, double norm) const {
        // Equal exponents: one rounding instead of two.
        if (e_ * p_ == 1.0) return std::pow(product_zero_wins(tail, norm), e_);
        const double t = std::pow(tail, e_);
        const double n = norm == kInf ? kInf : std::pow(norm, 1.0 / p_);
        return product_zero_wins(t, n);
    }

    double operator()(double x) const { return combine(mu0_.tail_mass(x), norm(x)); }

    double norm(double x) const {
        double n = inverse_density_norm(mu1_, p_, x, tol_);
        if (p_ == 1.0 && n != kInf && !mu1_.is_zero()) {
            // The sampled ess inf stops just short of x; include the endpoint value.
            const double wx = mu1_.density()(x);
            if (!(wx > 0.0)) return kInf;
            n = std::max(n, 1.0 / wx);
        }
        return n;
    }

private:
    const Measure& mu0_;
    const Measure& mu1_;
    double p_;
    double e_;
    double tol_;
};

// Tail masses mu0([x_i, b)) on the grid, accumulated from the right.
std::vector<double> grid_tails(const Measure& mu0, const std::vector<double>& xs, double tol) {
    const std::size_t n = xs.size();
    std::vector<double> tail(n, 0.0);
    const auto& atoms = mu0.atoms();
    std::size_t atom = atoms.size();
    double acc = 0.0;
    const double b = xs.back();
    for (std::size_t i = n - 1; i-- > 0;) {
        if (!mu0.is_zero()) acc += mu0.density().power_integral(xs[i], xs[i + 1], 1.0, {}, tol).value;
        while (atom > 0 && atoms[atom - 1].location >= xs[i]) {
            --atom;
            if (atoms[atom].location < b) acc += atoms[atom].mass;
        }
        tail[i] = acc;
    }
    return tail;
}

// ||1/w1||_{L^{1/(p-1)}([a, x_i])} on the grid, accumulated from the left.
std::vector<double> grid_norms(const Measure& mu1, double p, const std::vector<double>& xs,
                               double tol) {
    const std::size_t n = xs.size();
    std::vector<double> norm(n, kInf);
    norm[0] = 0.0;
    if (mu1.is_zero()) return norm;
    const Density& w = mu1.density();
    if (p == 1.0) {
        if (w.gamma() > 0.0) return norm;
        double inf_w = kInf;
        constexpr int kSub = 16;
        for (std::size_t i = 1; i < n; ++i) {
            for (int j = (i == 1 && w.gamma() < 0.0) ? 1 : 0; j <= kSub; ++j)
                inf_w = std::min(inf_w, w(xs[i - 1] + (xs[i] - xs[i - 1]) * j / kSub));
            for (double k : w.breakpoints())
                if (k > xs[i - 1] && k <= xs[i]) inf_w = std::min(inf_w, w(k));
            norm[i] = inf_w > 0.0 ? 1.0 / inf_w : kInf;
        }
        return norm;
    }
    const double r = 1.0 / (p - 1.0);
    double acc = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        try {
            acc += w.power_integral(xs[i - 1], xs[i], -r, {}, tol).value;
        } catch (const DivergenceError&) {
            break;
        } catch (const EvaluationError&) {
            break;
        } catch (const ConvergenceFailure&) {
            break;
        }
        if (!std::isfinite(acc)) break;
        norm[i] = std::pow(acc, p - 1.0);
    }
    return norm;
}

struct Candidate {
    double value;
    std::optional<double> x;
};

}  // namespace

SupResult muckenhoupt_sup(const Measure& mu0, const Measure& mu1, double p, double tail_exponent,
                          double tol) {
    if (mu0.charges_b())
        throw PreconditionError("no_mass_at_b: mu0 must not charge the right endpoint b");
    if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("muckenhoupt_sup needs 1 <= p < inf");
    if (!(tail_exponent >= 0.0)) throw DomainError("tail exponent must be >= 0");
    if (!(tol > 0.0)) throw DomainError("tol must be > 0");
    const Interval iv = mu0.interval();
    const double a = iv.a;
    const double b = iv.b;
    const double len = iv.length();
    if (mu0.is_zero() && tail_exponent > 0.0) return {0.0, std::nullopt};

    const Product F(mu0, mu1, p, tail_exponent, tol);

    // Grid scan.
    std::vector<double> xs(kSupGridPoints);
    for (int i = 0; i < kSupGridPoints; ++i) xs[i] = a + len * i / (kSupGridPoints - 1);
    xs.back() = b;
    const auto tails = grid_tails(mu0, xs, tol);
    const auto norms = grid_norms(mu1, p, xs, tol);
    Candidate best{0.0, std::nullopt};
    std::size_t best_i = 0;
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
        const double v = F.combine(tails[i], norms[i]);
        if (v == kInf) return {kInf, std::nullopt};
        if (v > best.value) {
            best = {v, xs[i]};
            best_i = i;
        }
    }

    std::vector<Candidate> cands{best};

    // Limit at a+: the tail tends to mu0((a, b)); for p = 1 the norm tends to 1/w1(a+).
    {
        double n0 = 0.0;
        if (p == 1.0) {
            if (mu1.is_zero()) {
                n0 = kInf;
            } else {
                const double wa = mu1.density().limit_at_a();
                n0 = wa == kInf ? 0.0 : (wa > 0.0 ? 1.0 / wa : kInf);
            }
        }
        const double v = F.combine(mu0.open_mass(), n0);
        if (v == kInf) return {kInf, std::nullopt};
        cands.push_back({v, std::nullopt});
    }

    // Golden-section refinement on the winning bracket.
    if (best_i > 0) {
        double lo = xs[best_i - 1];
        double hi = xs[best_i + 1];
        double x1 = hi - kGolden * (hi - lo);
        double x2 = lo + kGolden * (hi - lo);
        double f1 = F(x1);
        double f2 = F(x2);
        while (hi - lo > 1e-12 * len) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + kGolden * (hi - lo);
                f2 = F(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - kGolden * (hi - lo);
                f1 = F(x1);
            }
        }
        if (f1 == kInf || f2 == kInf) return {kInf, std::nullopt};
        cands.push_back(f1 >= f2 ? Candidate{f1, x1} : Candidate{f2, x2});
    }

    // Atoms of mu0 (the tail drops just after them) and knots of w1 (the p = 1 norm jumps
    // just after them).
    for (const Atom& at : mu0.atoms())
        if (at.location > a && at.location < b) cands.push_back({F(at.location), at.location});
    if (!mu1.is_zero()) {
        for (double k : mu1.density().breakpoints()) {
            const double x = std::min(k + 1e-12 * len, b - 1e-12 * len);
            if (x > a && x < b) cands.push_back({F(x), x});
        }
    }

    // Probes toward b detect unbounded growth.
    std::vector<double> probe_vals;
    double last_x = a;
    for (int k = kFirstProbe; k <= kLastProbe; ++k) {
        const double x = b - len * std::ldexp(1.0, -k);
        if (!(x > last_x) || !(x < b)) break;
        last_x = x;
        const double v = F(x);
        if (v == kInf) return {kInf, std::nullopt};
        probe_vals.push_back(v);
        cands.push_back({v, x});
    }
    if (probe_vals.size() >= 12) {
        const std::size_t m = probe_vals.size();
        bool growing = probe_vals[m - 1] > probe_vals[m - 11] * (1.0 + 1e-3);
        for (std::size_t j = m - 10; j < m && growing; ++j) {
            const double step = probe_vals[j] - probe_vals[j - 1];
            const double prev = probe_vals[j - 1] - probe_vals[j - 2];
            growing = step > 0.0 && step >= 0.98 * prev;
        }
        if (growing) return {kInf, std::nullopt};
    }

    Candidate top = cands.front();
    for (const Candidate& c : cands)
        if (c.value > top.value) top = c;
    // A supremum reached only in the limit at b is not attained.
    if (!probe_vals.empty() && top.value == probe_vals.back()) top.x.reset();
    return {top.value, top.x};
}

double muckenhoupt_C(double B, const ExponentPair& pq) {
    if (pq.p == 1.0) return B;
    const double p = pq.p;
    const double q = pq.q;
    // (q/(q-1))^{(p-1)/p} q^{1/q} under a single outer root.
    return B * std::pow(std::pow(q / (q - 1.0), p - 1.0) * std::pow(q, p / q), 1.0 / p);
}

MuckenhouptConstants compute_B(const Measure& mu0, const Measure& mu1, const ExponentPair& pq,
                               double tol) {
    const SupResult s = muckenhoupt_sup(mu0, mu1, pq.p, 1.0 / pq.q, tol);
    return {s.value, muckenhoupt_C(s.value, pq), s.argmax, pq};
}

std::pair<double, double> power_product_sup(Interval interval, double alpha_exp, double beta_exp) {
    if (!(alpha_exp > 0.0) || !std::isfinite(alpha_exp))
        throw DomainError("power_product_sup needs alpha > 0");
    if (!(beta_exp >= 0.0) || !std::isfinite(beta_exp))
        throw DomainError("power_product_sup needs beta >= 0");
    const double len = interval.length();
    if (beta_exp == 0.0) return {std::pow(len, alpha_exp), interval.a};
    const double s = alpha_exp + beta_exp;
    const double value = std::pow(alpha_exp / s, alpha_exp) * std::pow(beta_exp / s, beta_exp) *
                         std::pow(len, s);
    return {value, (interval.a * alpha_exp + interval.b * beta_exp) / s};
}

double lebesgue_B_closed_form(Interval interval, const ExponentPair& pq) {
    if (pq.p == 1.0) return std::pow(interval.length(), 1.0 / pq.q);
    return power_product_sup(interval, 1.0 / pq.q, (pq.p - 1.0) / pq.p).first;
}

}  // namespace opial
