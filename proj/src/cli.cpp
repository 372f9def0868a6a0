#include "opial/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "opial/config.hpp"
#include "opial/errors.hpp"
#include "opial/muckenhoupt.hpp"
#include "opial/operators.hpp"
#include "opial/opial.hpp"

namespace opial::cli {

using nlohmann::json;

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

struct Common {
    std::string config;
    std::string out;
    int jobs = 1;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
    auto* opt = sub->add_option("--config", c.config, "problem config (JSON)");
    if (config_required) opt->required();
    sub->add_option("--out", c.out, "write the report here instead of stdout");
    sub->add_option("--jobs", c.jobs, "worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", c.seed, "overrides the config seed");
    sub->add_option("--tol", c.tol, "relative quadrature tolerance")->check(CLI::PositiveNumber);
}

json num(double x) { return std::isfinite(x) ? json(x) : json(format_number(x)); }

// Writes the report to --out, the config's output path, or `out`.
bool emit(const std::string& text, const std::string& path, std::ostream& out, std::ostream& err) {
    if (path.empty()) {
        out << text;
        return true;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        err << "error: cannot write " << path << "\n";
        return false;
    }
    f << text;
    return true;
}

std::string target(const Common& c, const ProblemConfig& cfg) {
    return !c.out.empty() ? c.out : cfg.output.value_or("");
}

ProblemConfig load(const Common& c) {
    ProblemConfig cfg = load_config(c.config);
    if (c.seed) cfg.seed = c.seed;
    if (c.tol) cfg.tol = *c.tol;
    return cfg;
}

unsigned worker_count(int jobs) {
    if (jobs > 0) return static_cast<unsigned>(jobs);
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, n) on up to `jobs` threads.
template <class Body>
void parallel_for(std::size_t n, unsigned jobs, Body body) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) body(i);
    };
    const unsigned extra = std::min<std::size_t>(jobs, n) > 0 ? std::min<std::size_t>(jobs, n) - 1 : 0;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < extra; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

struct Row {
    std::optional<OpialReport> report;
    std::string error;
};

int cmd_verify(const Common& c, std::ostream& out, std::ostream& err) {
    const ProblemConfig cfg = load(c);
    const auto funcs = cfg.all_functions();
    if (funcs.empty()) {
        err << "error: config lists no functions\n";
        return kInvalid;
    }
    const std::size_t nf = funcs.size();
    const std::size_t np = cfg.exponents.size();

    std::vector<std::optional<OpialVerifier>> verifiers(np);
    std::vector<std::string> setup_error(np);
    parallel_for(np, worker_count(c.jobs), [&](std::size_t k) {
        try {
            verifiers[k].emplace(cfg.variant, cfg.mu0, cfg.mu1, cfg.exponents[k], cfg.kernel, cfg.tol);
        } catch (const std::exception& e) {
            setup_error[k] = e.what();
        }
    });

    std::vector<Row> rows(np * nf);
    parallel_for(rows.size(), worker_count(c.jobs), [&](std::size_t i) {
        const std::size_t k = i / nf;
        if (!verifiers[k]) {
            rows[i].error = setup_error[k];
            return;
        }
        try {
            rows[i].report = verifiers[k]->evaluate(funcs[i % nf]);
        } catch (const std::exception& e) {
            rows[i].error = e.what();
        }
    });

    std::ostringstream csv;
    csv << "variant,p,q,B,C,lhs,rhs,ratio,holds,err_estimate\n";
    int code = kOk;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const ExponentPair& pq = cfg.exponents[i / nf];
        csv << to_string(cfg.variant) << ',' << format_number(pq.p) << ',' << format_number(pq.q) << ',';
        if (const auto& r = rows[i].report) {
            csv << format_number(r->B) << ',' << format_number(r->constant) << ','
                << format_number(r->lhs) << ',' << format_number(r->rhs) << ','
                << format_number(r->ratio) << ',' << to_string(r->verdict) << ','
                << format_number(r->err_estimate) << '\n';
            if (r->verdict == Verdict::violated || r->verdict == Verdict::hypothesis_failure) {
                code = kFailed;
                err << "instance " << i << ": " << to_string(r->verdict)
                    << (r->diagnosis.empty() ? "" : " (" + r->diagnosis + ")") << "\n";
            }
        } else {
            csv << "nan,nan,nan,nan,nan,error,nan\n";
            err << "instance " << i << ": " << rows[i].error << "\n";
            code = kFailed;
        }
    }
    if (!emit(csv.str(), target(c, cfg), out, err)) return kFailed;
    return code;
}

struct KernelFlags {
    std::string tag;
    double alpha = 1.0;
    std::string g = "identity";
    double g_gamma = 1.0;
};

void add_kernel_flags(CLI::App* sub, KernelFlags& k) {
    sub->add_option("--tag", k.tag, "kernel: rl, hadamard or g_weighted");
    sub->add_option("--alpha", k.alpha, "order alpha > 0");
    sub->add_option("--g", k.g, "g for g_weighted: identity, log or power");
    sub->add_option("--g-gamma", k.g_gamma, "exponent for --g power");
}

TKernel make_kernel(const KernelFlags& k, Interval iv) {
    KernelTag tag;
    if (k.tag == "rl") tag = KernelTag::rl;
    else if (k.tag == "hadamard") tag = KernelTag::hadamard;
    else if (k.tag == "g_weighted") tag = KernelTag::g_weighted;
    else throw DomainError("unknown kernel tag '" + k.tag + "'");
    std::optional<GFunction> g;
    if (tag == KernelTag::g_weighted) {
        if (k.g == "identity") g = GFunction::identity();
        else if (k.g == "log") g = GFunction::log();
        else if (k.g == "power") g = GFunction::power(k.g_gamma);
        else throw DomainError("unknown g '" + k.g + "'");
    }
    return make_specialization(tag, k.alpha, iv, g);
}

struct ConstantFlags {
    std::optional<double> a, b;
    double p = 1.0, q = 1.0;
    KernelFlags kernel;
};

int cmd_constant(const Common& c, const ConstantFlags& f, std::ostream& out, std::ostream& err) {
    std::optional<ProblemConfig> cfg;
    if (!c.config.empty()) cfg = load(c);
    std::optional<Interval> iv;
    try {
        if (cfg) iv = cfg->interval;
        if (f.a || f.b) {
            if (!f.a || !f.b) throw DomainError("--a and --b go together");
            const Interval flags(*f.a, *f.b);
            if (iv && (iv->a != flags.a || iv->b != flags.b))
                throw DomainError("--a/--b disagree with the config interval");
            iv = flags;
        }
        if (!iv) throw DomainError("need --a and --b, or --config");
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalid;
    }
    std::optional<ExponentPair> pq;
    Measure mu0 = Measure::lebesgue(*iv);
    Measure mu1 = mu0;
    try {
        pq.emplace(f.p, f.q);
        if (!f.kernel.tag.empty()) {
            if (cfg) throw DomainError("give the kernel in the config or by flags, not both");
            mu0 = Measure(induced_density(make_kernel(f.kernel, *iv)));
            mu1 = mu0;
        } else if (cfg) {
            if (cfg->kernel) {
                mu0 = Measure(induced_density(*cfg->kernel));
                mu1 = mu0;
            } else {
                mu0 = cfg->mu0;
                mu1 = cfg->mu1;
            }
        }
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailed;
    }
    try {
        const double tol = c.tol.value_or(cfg ? cfg->tol : 1e-10);
        const MuckenhouptConstants mc = compute_B(mu0, mu1, *pq, tol);
        json j{{"B", num(mc.B)}, {"C", num(mc.C)}, {"argmax_x", mc.argmax_x ? json(*mc.argmax_x) : json(nullptr)},
               {"p", pq->p}, {"q", pq->q}, {"a", iv->a}, {"b", iv->b}};
        return emit(j.dump(2) + "\n", !c.out.empty() ? c.out : (cfg ? cfg->output.value_or("") : ""), out, err)
                   ? kOk
                   : kFailed;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailed;
    }
}

struct OperatorFlags {
    double a = 0.0, b = 1.0, t = 1.0;
    std::vector<double> f{1.0};
    KernelFlags kernel;
};

int cmd_operator(const Common& c, const OperatorFlags& o, std::ostream& out, std::ostream& err) {
    std::optional<TKernel> k;
    PiecewiseSmoothFn fn;
    try {
        const Interval iv(o.a, o.b);
        if (o.kernel.tag.empty()) throw DomainError("--tag is required");
        k.emplace(make_kernel(o.kernel, iv));
        if (!(o.t >= iv.a && o.t <= iv.b)) throw DomainError("t must lie in [a, b]");
        if (!c.config.empty()) {
            const ProblemConfig cfg = load(c);
            if (cfg.functions.empty()) throw DomainError("config lists no explicit function");
            if (cfg.interval.a != iv.a || cfg.interval.b != iv.b)
                throw DomainError("config interval disagrees with --a/--b");
            fn = cfg.functions.front().value_fn();
        } else {
            const PiecewisePolynomial poly = PiecewisePolynomial::single(iv, o.f);
            fn = PiecewiseSmoothFn([poly](double x) { return poly(x); });
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInvalid;
    }
    const double tol = c.tol.value_or(1e-10);
    json j{{"tag", to_string(k->tag())}, {"alpha", k->alpha()}, {"a", o.a}, {"b", o.b}, {"t", o.t}};
    try {
        const auto jr = j_right_with_error(*k, fn, o.t, tol);
        const auto jl = j_left_with_error(*k, fn, o.t, tol);
        j["j_right"] = num(jr.value);
        j["j_right_err"] = num(jr.error);
        j["j_left"] = num(jl.value);
        j["j_left_err"] = num(jl.error);
        if (k->alpha() < 1.0 && o.t > o.a && o.t < o.b) {
            const double dtol = std::max(tol, 1e-6);
            const auto dr = d_right_with_error(*k, fn, o.t, dtol);
            const auto dl = d_left_with_error(*k, fn, o.t, dtol);
            j["d_right"] = num(dr.value);
            j["d_right_err"] = num(dr.error);
            j["d_left"] = num(dl.value);
            j["d_left_err"] = num(dl.error);
        }
    } catch (const std::exception& e) {
        err << "diagnosis: " << e.what() << "\n";
        return kFailed;
    }
    return emit(j.dump(2) + "\n", c.out, out, err) ? kOk : kFailed;
}

int cmd_sharpness(const Common& c, std::ostream& out, std::ostream& err) {
    const ProblemConfig cfg = load(c);
    if (cfg.exponents.size() != 1) {
        err << "error: sharpness takes exactly one [p, q] pair\n";
        return kInvalid;
    }
    try {
        const OpialVerifier v(cfg.variant, cfg.mu0, cfg.mu1, cfg.exponents.front(), cfg.kernel, cfg.tol);
        const auto family = cfg.all_functions();
        const SharpnessResult res =
            !family.empty() ? sharpness_search(v, family)
                            : sharpness_search(v, SharpnessOptions{cfg.sharpness.budget, cfg.seed.value_or(0),
                                                                   cfg.sharpness.pieces});
        const json j{{"variant", to_string(cfg.variant)},
                     {"p", cfg.exponents.front().p},
                     {"q", cfg.exponents.front().q},
                     {"best_ratio", num(res.best_ratio)},
                     {"evaluations", res.evaluations},
                     {"witness", describe_function(res.witness)}};
        return emit(j.dump(2) + "\n", target(c, cfg), out, err) ? kOk : kFailed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailed;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app("Numerical verification of Opial-type inequalities", "opial");
    app.require_subcommand(1);

    Common verify_c, constant_c, operator_c, sharp_c;
    auto* verify = app.add_subcommand("verify", "check every (function, exponent pair) instance; CSV report");
    add_common(verify, verify_c, true);

    ConstantFlags cf;
    auto* constant = app.add_subcommand("constant", "Muckenhoupt constants B and C as JSON");
    add_common(constant, constant_c, false);
    constant->add_option("--a", cf.a, "left endpoint");
    constant->add_option("--b", cf.b, "right endpoint");
    constant->add_option("--p", cf.p, "p >= 1")->required();
    constant->add_option("--q", cf.q, "q >= p")->required();
    add_kernel_flags(constant, cf.kernel);

    OperatorFlags of;
    auto* op = app.add_subcommand("operator", "generalized fractional integrals and derivatives at t");
    add_common(op, operator_c, false);
    add_kernel_flags(op, of.kernel);
    op->add_option("--a", of.a, "left endpoint")->required();
    op->add_option("--b", of.b, "right endpoint")->required();
    op->add_option("--t", of.t, "evaluation point")->required();
    op->add_option("--f", of.f, "coefficients of f in powers of (x - a)")->delimiter(',');

    auto* sharp = app.add_subcommand("sharpness", "search for the largest lhs/rhs ratio; JSON report");
    add_common(sharp, sharp_c, true);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (*verify) return cmd_verify(verify_c, out, err);
        if (*constant) return cmd_constant(constant_c, cf, out, err);
        if (*op) return cmd_operator(operator_c, of, out, err);
        return cmd_sharpness(sharp_c, out, err);
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return kInvalid;
    }
}

}  // namespace opial::cli
