#include "opial/quad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "opial/errors.hpp"

namespace opial::quad {

namespace {

// QUADPACK qk15 abscissae and weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Cell {
    double lo;
    double hi;
    double value;
    double error;
    double absval;
    int depth;
};

struct CellOrder {
    bool operator()(const Cell& x, const Cell& y) const { return x.error < y.error; }
};

double sample(const std::function<double(double)>& f, double x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "non-finite integrand value at x = " << x;
        throw EvaluationError(msg.str(), x);
    }
    return v;
}

Cell kronrod15(const std::function<double(double)>& f, double lo, double hi, int depth) {
    const double centr = 0.5 * (lo + hi);
    const double hlgth = 0.5 * (hi - lo);
    const double dhlgth = std::abs(hlgth);

    std::array<double, 7> fv1{};
    std::array<double, 7> fv2{};
    const double fc = sample(f, centr);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(resk);
    for (int j = 0; j < 3; ++j) {
        const int jtw = 2 * j + 1;
        const double absc = hlgth * kXgk[jtw];
        const double f1 = sample(f, centr - absc);
        const double f2 = sample(f, centr + absc);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += kWg[j] * (f1 + f2);
        resk += kWgk[jtw] * (f1 + f2);
        resabs += kWgk[jtw] * (std::abs(f1) + std::abs(f2));
    }
    for (int j = 0; j < 4; ++j) {
        const int jtwm1 = 2 * j;
        const double absc = hlgth * kXgk[jtwm1];
        const double f1 = sample(f, centr - absc);
        const double f2 = sample(f, centr + absc);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += kWgk[jtwm1] * (f1 + f2);
        resabs += kWgk[jtwm1] * (std::abs(f1) + std::abs(f2));
    }
    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

    const double result = resk * hlgth;
    resabs *= dhlgth;
    resasc *= dhlgth;
    double abserr = std::abs((resk - resg) * hlgth);
    if (resasc != 0.0 && abserr != 0.0)
        abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps))
        abserr = std::max(kEps * 50.0 * resabs, abserr);
    return Cell{lo, hi, result, abserr, resabs, depth};
}

std::vector<double> cut_points(double lo, double hi, std::span<const double> breakpoints) {
    std::vector<double> pts{lo};
    for (double x : breakpoints)
        if (x > lo && x < hi) pts.push_back(x);
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

// Global adaptive driver over a set of initial cells, plus a fixed contribution that is
// not refined (the closed-form terminal cell of a graded mesh).
QuadResult run_adaptive(const std::function<double(double)>& f,
                        const std::vector<std::pair<double, double>>& initial,
                        const AdaptiveOptions& opts, QuadResult fixed = {},
                        double fixed_abs = 0.0) {
    std::priority_queue<Cell, std::vector<Cell>, CellOrder> heap;
    double value = fixed.value;
    double error = fixed.error;
    double absval = fixed_abs;
    for (auto [lo, hi] : initial) {
        if (!(hi > lo)) continue;
        Cell c = kronrod15(f, lo, hi, 0);
        value += c.value;
        error += c.error;
        absval += c.absval;
        heap.push(c);
    }
    std::size_t cells = heap.size();
    auto converged = [&] {
        return error <= opts.tol * std::max(std::abs(value), absval);
    };
    while (!heap.empty() && !converged()) {
        Cell worst = heap.top();
        if (worst.depth >= opts.max_depth || cells >= opts.max_cells) {
            std::ostringstream msg;
            msg << "adaptive quadrature did not reach tolerance " << opts.tol
                << " (depth cap " << opts.max_depth << ")";
            throw ConvergenceFailure(msg.str(), value, error);
        }
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        Cell left = kronrod15(f, worst.lo, mid, worst.depth + 1);
        Cell right = kronrod15(f, mid, worst.hi, worst.depth + 1);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        absval += left.absval + right.absval - worst.absval;
        heap.push(left);
        heap.push(right);
        ++cells;
    }
    // Recompute the sums from the surviving cells to shed accumulated update roundoff.
    double v = fixed.value;
    double e = fixed.error;
    while (!heap.empty()) {
        v += heap.top().value;
        e += heap.top().error;
        heap.pop();
    }
    return {v, e};
}

// Product-integration rule on [0, 1] exact for tau^exponent * (polynomial of degree n-1).
// Weights come from Legendre moments, which stay well conditioned:
//   integral_0^1 tau^l P_k(2 tau - 1) dtau = prod_{i<k} (l - i) / prod_{i=1..k+1} (l + i).
struct ProductRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

ProductRule power_product_rule(int n, double exponent) {
    const GaussRule gl = gauss_legendre(n);
    std::vector<double> moments(static_cast<std::size_t>(n));
    double num = 1.0;
    double den = exponent + 1.0;
    for (int k = 0; k < n; ++k) {
        moments[k] = num / den;
        num *= exponent - k;
        den *= exponent + k + 2.0;
    }
    ProductRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int j = 0; j < n; ++j) {
        const double x = gl.nodes[j];
        rule.nodes[j] = 0.5 * (x + 1.0);
        double p0 = 1.0;
        double p1 = x;
        double acc = moments[0];
        for (int k = 1; k < n; ++k) {
            acc += (2.0 * k + 1.0) * p1 * moments[k];
            const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
            p0 = p1;
            p1 = p2;
        }
        rule.weights[j] = 0.5 * gl.weights[j] * acc;
    }
    return rule;
}

}  // namespace

GaussRule gauss_legendre(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

QuadResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                              std::span<const double> breakpoints, const AdaptiveOptions& opts) {
    if (lo == hi) return {};
    if (hi < lo) {
        QuadResult r = integrate_adaptive(f, hi, lo, breakpoints, opts);
        return {-r.value, r.error};
    }
    const auto pts = cut_points(lo, hi, breakpoints);
    std::vector<std::pair<double, double>> cells;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) cells.emplace_back(pts[i], pts[i + 1]);
    return run_adaptive(f, cells, opts);
}

QuadResult integrate_power_weighted(const std::function<double(double)>& smooth, double lo,
                                    double hi, double singular_point, double exponent,
                                    std::span<const double> breakpoints,
                                    const AdaptiveOptions& opts) {
    if (lo == hi) return {};
    if (hi < lo) {
        QuadResult r =
            integrate_power_weighted(smooth, hi, lo, singular_point, exponent, breakpoints, opts);
        return {-r.value, r.error};
    }
    if (singular_point > lo && singular_point < hi)
        throw DomainError("singular point must not lie inside the integration interval");
    if (exponent == 0.0) return integrate_adaptive(smooth, lo, hi, breakpoints, opts);

    const bool toward_left = singular_point <= lo;  // singular point sits at/left of lo
    const double d_near = toward_left ? lo - singular_point : singular_point - hi;
    const double d_far = toward_left ? hi - singular_point : singular_point - lo;
    if (d_near == 0.0 && exponent <= -1.0)
        throw DivergenceError("endpoint power singularity with exponent <= -1 is not integrable");

    auto to_s = [&](double d) { return toward_left ? singular_point + d : singular_point - d; };
    // Cells live in the distance variable d = |s - singular_point| so the power weight is
    // evaluated exactly rather than from a rounded s.
    auto weighted = [&, exponent](double d) { return smooth(to_s(d)) * std::pow(d, exponent); };

    // Distances of breakpoints from the singular point.
    std::vector<double> break_d;
    for (double x : breakpoints) {
        const double d = std::abs(x - singular_point);
        if (d > d_near && d < d_far) break_d.push_back(d);
    }

    std::vector<double> mesh;  // increasing distances
    QuadResult terminal;
    double terminal_abs = 0.0;
    if (d_near == 0.0) {
        constexpr int kLevels = 9;  // 0.15^9 ~ 3.8e-8
        double eps = d_far * std::pow(kGradingRatio, kLevels);
        for (double d : break_d) eps = std::min(eps, kGradingRatio * d);
        // Product integration on [0, eps] in the distance variable; the smaller rule
        // gives the error estimate.
        auto apply = [&](int n) {
            const ProductRule rule = power_product_rule(n, exponent);
            double acc = 0.0;
            double acc_abs = 0.0;
            for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
                const double s = to_s(rule.nodes[j] * eps);
                const double v = sample(smooth, s);
                acc += rule.weights[j] * v;
                acc_abs += std::abs(rule.weights[j] * v);
            }
            const double scale = std::pow(eps, exponent + 1.0);
            return std::pair{acc * scale, acc_abs * scale};
        };
        const auto [fine, fine_abs] = apply(8);
        const auto [coarse, coarse_abs] = apply(6);
        (void)coarse_abs;
        terminal = {fine, std::abs(fine - coarse) + 50.0 * kEps * fine_abs};
        terminal_abs = fine_abs;
        mesh.push_back(eps);
    } else {
        mesh.push_back(d_near);
    }
    while (mesh.back() < d_far) mesh.push_back(std::min(d_far, mesh.back() / kGradingRatio));
    mesh.insert(mesh.end(), break_d.begin(), break_d.end());
    std::sort(mesh.begin(), mesh.end());
    mesh.erase(std::unique(mesh.begin(), mesh.end()), mesh.end());

    std::vector<std::pair<double, double>> cells;
    for (std::size_t i = 0; i + 1 < mesh.size(); ++i) cells.emplace_back(mesh[i], mesh[i + 1]);
    return run_adaptive(weighted, cells, opts, terminal, terminal_abs);
}

QuadResult integrate_endpoint_singular(const SingularIntegralSpec& spec, double tol) {
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    if (!(spec.exponent > -1.0))
        throw DivergenceError("endpoint singularity exponent must exceed -1");
    std::function<double(double)> phi = spec.smooth;
    if (spec.substitution_weight) {
        phi = [&spec](double s) { return spec.smooth(s) * spec.substitution_weight(s); };
    }
    const double e =
        spec.singular_end == SingularEnd::left ? spec.interval.a : spec.interval.b;
    AdaptiveOptions opts;
    opts.tol = tol;
    return integrate_power_weighted(phi, spec.interval.a, spec.interval.b, e, spec.exponent,
                                    spec.breakpoints, opts);
}

double gamma_fn(double x) {
    if (!(x > 0.0)) throw DomainError("gamma_fn requires x > 0");
    return std::tgamma(x);
}

double beta_fn(double x, double y) {
    if (!(x > 0.0) || !(y > 0.0)) throw DomainError("beta_fn requires positive arguments");
    return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

}  // namespace opial::quad
