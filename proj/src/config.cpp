#include "opial/config.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "opial/errors.hpp"

namespace opial::cli {

using nlohmann::json;

namespace {

// Maps JSON pointers to the line where the key (or the bare value) starts. Runs on text
// that nlohmann has already accepted, so it only needs to track structure.
class LineIndex {
public:
    explicit LineIndex(const std::string& text) : s_(text) {
        skip();
        value("");
    }

    int line(std::string ptr) const {
        for (;;) {
            const auto it = lines_.find(ptr);
            if (it != lines_.end()) return it->second;
            if (ptr.empty()) return 1;
            ptr.erase(ptr.rfind('/'));
        }
    }

private:
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
            if (s_[i_] == '\n') ++line_;
            ++i_;
        }
    }

    std::string string() {
        std::string out;
        ++i_;
        while (i_ < s_.size() && s_[i_] != '"') {
            if (s_[i_] == '\\') ++i_;
            if (i_ < s_.size()) out += s_[i_++];
        }
        ++i_;
        return out;
    }

    static std::string escape(const std::string& key) {
        std::string out;
        for (char c : key) {
            if (c == '~') out += "~0";
            else if (c == '/') out += "~1";
            else out += c;
        }
        return out;
    }

    void value(const std::string& path) {
        lines_.emplace(path, line_);
        if (i_ >= s_.size()) return;
        const char c = s_[i_];
        if (c == '{') {
            ++i_;
            skip();
            while (i_ < s_.size() && s_[i_] != '}') {
                const int key_line = line_;
                const std::string child = path + "/" + escape(string());
                lines_.emplace(child, key_line);
                skip();
                ++i_;  // ':'
                skip();
                value(child);
                skip();
                if (i_ < s_.size() && s_[i_] == ',') ++i_;
                skip();
            }
            ++i_;
        } else if (c == '[') {
            ++i_;
            skip();
            for (int k = 0; i_ < s_.size() && s_[i_] != ']'; ++k) {
                value(path + "/" + std::to_string(k));
                skip();
                if (i_ < s_.size() && s_[i_] == ',') ++i_;
                skip();
            }
            ++i_;
        } else if (c == '"') {
            string();
        } else {
            while (i_ < s_.size() && std::string_view(",]} \t\r\n").find(s_[i_]) == std::string_view::npos)
                ++i_;
        }
    }

    const std::string& s_;
    std::size_t i_ = 0;
    int line_ = 1;
    std::map<std::string, int> lines_;
};

class Reader {
public:
    Reader(const std::string& text, std::string source) : index_(text), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
        throw ConfigError(source_, index_.line(ptr), msg);
    }

    void keys(const json& j, const std::string& ptr, std::initializer_list<const char*> allowed) const {
        if (!j.is_object()) fail(ptr, "expected an object");
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [k, v] : j.items())
            if (!ok.count(k)) fail(ptr + "/" + k, "unknown field '" + k + "'");
    }

    double number(const json& j, const std::string& ptr) const {
        if (!j.is_number()) fail(ptr, "expected a number");
        return j.get<double>();
    }

    int integer(const json& j, const std::string& ptr, int lo) const {
        if (!j.is_number_integer() || j.get<long long>() < lo)
            fail(ptr, "expected an integer >= " + std::to_string(lo));
        return j.get<int>();
    }

    std::uint64_t seed(const json& j, const std::string& ptr) const {
        if (!j.is_number_unsigned()) fail(ptr, "expected a non-negative integer seed");
        return j.get<std::uint64_t>();
    }

    std::string string(const json& j, const std::string& ptr) const {
        if (!j.is_string()) fail(ptr, "expected a string");
        return j.get<std::string>();
    }

    std::vector<double> numbers(const json& j, const std::string& ptr) const {
        if (!j.is_array()) fail(ptr, "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < j.size(); ++i)
            out.push_back(number(j[i], ptr + "/" + std::to_string(i)));
        return out;
    }

    std::vector<std::vector<double>> rows(const json& j, const std::string& ptr) const {
        if (!j.is_array()) fail(ptr, "expected an array of arrays");
        std::vector<std::vector<double>> out;
        for (std::size_t i = 0; i < j.size(); ++i)
            out.push_back(numbers(j[i], ptr + "/" + std::to_string(i)));
        return out;
    }

private:
    LineIndex index_;
    std::string source_;
};

PiecewisePolynomial read_pieces(const Reader& r, const json& j, const std::string& ptr,
                                Interval iv) {
    if (!j.contains("coefficients")) r.fail(ptr, "missing field 'coefficients'");
    auto coeffs = r.rows(j["coefficients"], ptr + "/coefficients");
    std::vector<double> knots{iv.a, iv.b};
    if (j.contains("knots")) {
        knots = r.numbers(j["knots"], ptr + "/knots");
        if (knots.size() < 2 || knots.front() != iv.a || knots.back() != iv.b)
            r.fail(ptr + "/knots", "knots must start at a and end at b");
    }
    try {
        return PiecewisePolynomial(std::move(knots), std::move(coeffs));
    } catch (const std::exception& e) {
        r.fail(ptr, e.what());
    }
}

Measure read_measure(const Reader& r, const json& j, const std::string& ptr, Interval iv,
                     bool no_mass_at_b) {
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (name == "lebesgue") return Measure::lebesgue(iv);
        if (name == "zero") return Measure::zero(iv);
        r.fail(ptr, "unknown measure '" + name + "'");
    }
    r.keys(j, ptr, {"type", "c", "gamma", "delta", "knots", "coefficients", "atoms"});
    if (!j.contains("type")) r.fail(ptr, "missing field 'type'");
    const std::string type = r.string(j["type"], ptr + "/type");
    auto num_or = [&](const char* k, double dflt) {
        return j.contains(k) ? r.number(j[k], ptr + "/" + k) : dflt;
    };
    std::vector<Atom> atoms;
    if (j.contains("atoms")) {
        const json& a = j["atoms"];
        if (!a.is_array()) r.fail(ptr + "/atoms", "expected an array of [location, mass]");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string ap = ptr + "/atoms/" + std::to_string(i);
            const auto pair = r.numbers(a[i], ap);
            if (pair.size() != 2) r.fail(ap, "atom must be [location, mass]");
            atoms.push_back({pair[0], pair[1]});
        }
    }
    try {
        if (type == "lebesgue" || type == "zero" || type == "power") {
            if (type != "power" && (j.contains("c") || j.contains("gamma") || j.contains("delta")))
                r.fail(ptr, "c, gamma and delta apply to power densities only");
        }
        if (type == "lebesgue") return Measure(Density::lebesgue(iv), atoms, no_mass_at_b);
        if (type == "zero") {
            if (!atoms.empty()) r.fail(ptr + "/atoms", "the zero measure has no atoms");
            return Measure::zero(iv);
        }
        if (type == "power")
            return Measure(Density::power(iv, num_or("c", 1.0), num_or("gamma", 0.0), num_or("delta", 0.0)),
                           atoms, no_mass_at_b);
        if (type == "tabulated")
            return Measure(Density::tabulated(read_pieces(r, j, ptr, iv)), atoms, no_mass_at_b);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        r.fail(j.contains("atoms") && std::string(e.what()).find("no_mass_at_b") != std::string::npos
                   ? ptr + "/atoms"
                   : ptr,
               e.what());
    }
    r.fail(ptr + "/type", "unknown measure type '" + type + "'");
}

TKernel read_kernel(const Reader& r, const json& j, const std::string& ptr, Interval iv) {
    r.keys(j, ptr, {"tag", "alpha", "g"});
    if (!j.contains("tag")) r.fail(ptr, "missing field 'tag'");
    if (!j.contains("alpha")) r.fail(ptr, "missing field 'alpha'");
    const std::string tag = r.string(j["tag"], ptr + "/tag");
    const double alpha = r.number(j["alpha"], ptr + "/alpha");
    std::optional<GFunction> g;
    if (j.contains("g")) {
        const json& gj = j["g"];
        const std::string gp = ptr + "/g";
        if (gj.is_string() && gj == "identity") g = GFunction::identity();
        else if (gj.is_string() && gj == "log") g = GFunction::log();
        else if (gj.is_object()) {
            r.keys(gj, gp, {"power"});
            if (!gj.contains("power")) r.fail(gp, "expected {\"power\": gamma}");
            g = GFunction::power(r.number(gj["power"], gp + "/power"));
        } else {
            r.fail(gp, "g must be \"identity\", \"log\" or {\"power\": gamma}");
        }
    }
    KernelTag kt;
    if (tag == "rl") kt = KernelTag::rl;
    else if (tag == "hadamard") kt = KernelTag::hadamard;
    else if (tag == "g_weighted") kt = KernelTag::g_weighted;
    else r.fail(ptr + "/tag", "unknown kernel tag '" + tag + "'");
    try {
        return make_specialization(kt, alpha, iv, g);
    } catch (const std::exception& e) {
        r.fail(ptr, e.what());
    }
}

ACFunction read_function(const Reader& r, const json& j, const std::string& ptr, Interval iv) {
    r.keys(j, ptr, {"knots", "coefficients", "value_at_a", "breakpoint_values"});
    PiecewisePolynomial pieces = read_pieces(r, j, ptr, iv);
    const double fa = j.contains("value_at_a") ? r.number(j["value_at_a"], ptr + "/value_at_a") : 0.0;
    try {
        if (j.contains("breakpoint_values"))
            return ACFunction(std::move(pieces), fa,
                              r.numbers(j["breakpoint_values"], ptr + "/breakpoint_values"));
        return ACFunction(std::move(pieces), fa);
    } catch (const std::exception& e) {
        r.fail(ptr, e.what());
    }
}

}  // namespace

std::vector<ACFunction> ProblemConfig::all_functions() const {
    std::vector<ACFunction> out = functions;
    if (random) {
        auto fam = random_ac_family(interval, seed.value_or(random->seed), random->count, true,
                                    random->pieces);
        out.insert(out.end(), fam.begin(), fam.end());
    }
    return out;
}

ProblemConfig parse_config(const std::string& text, const std::string& source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        int line = 1;
        for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
            if (text[i] == '\n' && i + 1 < e.byte) ++line;
        throw ConfigError(source, line, "malformed JSON");
    }
    const Reader r(text, source);
    r.keys(j, "", {"interval", "variant", "mu0", "mu1", "kernel", "exponents", "functions", "random",
                   "tol", "seed", "sharpness", "output"});

    ProblemConfig cfg;
    if (!j.contains("interval")) r.fail("", "missing field 'interval'");
    const auto ab = r.numbers(j["interval"], "/interval");
    if (ab.size() != 2) r.fail("/interval", "interval must be [a, b]");
    try {
        cfg.interval = Interval(ab[0], ab[1]);
    } catch (const std::exception& e) {
        r.fail("/interval", e.what());
    }
    const Interval iv = cfg.interval;

    if (!j.contains("variant")) r.fail("", "missing field 'variant'");
    const std::string vname = r.string(j["variant"], "/variant");
    const auto variant = parse_variant(vname);
    if (!variant) r.fail("/variant", "unknown variant '" + vname + "'");
    cfg.variant = *variant;

    if (j.contains("tol")) {
        cfg.tol = r.number(j["tol"], "/tol");
        if (!(cfg.tol > 0.0)) r.fail("/tol", "tol must be > 0");
    }
    if (j.contains("seed")) cfg.seed = r.seed(j["seed"], "/seed");
    if (j.contains("output")) cfg.output = r.string(j["output"], "/output");

    const bool one_measure = cfg.variant != Variant::theorem_two_measure;
    if (is_fractional(cfg.variant)) {
        if (!j.contains("kernel")) r.fail("", "fractional variants need a 'kernel'");
        if (j.contains("mu0") || j.contains("mu1"))
            r.fail(j.contains("mu0") ? "/mu0" : "/mu1", "fractional variants take their measure from the kernel");
    } else if (j.contains("kernel")) {
        r.fail("/kernel", "a kernel applies to fractional variants only");
    }
    if (one_measure && j.contains("mu1")) r.fail("/mu1", "variant '" + vname + "' uses mu0 only");
    cfg.mu0 = j.contains("mu0") ? read_measure(r, j["mu0"], "/mu0", iv, true) : Measure::lebesgue(iv);
    cfg.mu1 = j.contains("mu1") ? read_measure(r, j["mu1"], "/mu1", iv, false) : cfg.mu0;
    if (one_measure) cfg.mu1 = cfg.mu0;
    if ((cfg.variant == Variant::lebesgue_pq || cfg.variant == Variant::lebesgue_p_le_2) &&
        (!cfg.mu0.density().is_lebesgue() || !cfg.mu0.atoms().empty()))
        r.fail(j.contains("mu0") ? "/mu0" : "/variant", "Lebesgue variants need plain Lebesgue measure");
    if (j.contains("kernel")) cfg.kernel = read_kernel(r, j["kernel"], "/kernel", iv);

    if (!j.contains("exponents")) r.fail("", "missing field 'exponents'");
    const auto pairs = r.rows(j["exponents"], "/exponents");
    if (pairs.empty()) r.fail("/exponents", "need at least one [p, q] pair");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const std::string ep = "/exponents/" + std::to_string(i);
        if (pairs[i].size() != 2) r.fail(ep, "exponent pair must be [p, q]");
        try {
            cfg.exponents.emplace_back(pairs[i][0], pairs[i][1]);
        } catch (const std::exception& e) {
            r.fail(ep, e.what());
        }
        if (is_p_le_2(cfg.variant) && pairs[i][0] > 2.0)
            r.fail(ep, "variant '" + vname + "' needs 1 <= p <= 2");
    }

    if (j.contains("functions")) {
        const json& fs = j["functions"];
        if (!fs.is_array()) r.fail("/functions", "expected an array of functions");
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const std::string fp = "/functions/" + std::to_string(i);
            ACFunction f = read_function(r, fs[i], fp, iv);
            if (f.value_at_a() != 0.0) r.fail(fp, "f(a) must be 0");
            cfg.functions.push_back(std::move(f));
        }
    }
    if (j.contains("random")) {
        const json& rj = j["random"];
        r.keys(rj, "/random", {"seed", "count", "pieces"});
        RandomFamily fam;
        if (rj.contains("seed")) fam.seed = r.seed(rj["seed"], "/random/seed");
        if (!rj.contains("count")) r.fail("/random", "missing field 'count'");
        fam.count = r.integer(rj["count"], "/random/count", 1);
        if (rj.contains("pieces")) fam.pieces = r.integer(rj["pieces"], "/random/pieces", 1);
        cfg.random = fam;
    }
    if (j.contains("sharpness")) {
        const json& sj = j["sharpness"];
        r.keys(sj, "/sharpness", {"budget", "pieces"});
        if (sj.contains("budget")) cfg.sharpness.budget = r.integer(sj["budget"], "/sharpness/budget", 1);
        if (sj.contains("pieces")) cfg.sharpness.pieces = r.integer(sj["pieces"], "/sharpness/pieces", 1);
    }
    return cfg;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot read config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

json describe_function(const ACFunction& f) {
    const auto& d = f.derivative_poly();
    json out{{"knots", d.knots()}, {"coefficients", d.coefficients()}, {"value_at_a", f.value_at_a()}};
    if (!f.breakpoint_values().empty()) out["breakpoint_values"] = f.breakpoint_values();
    return out;
}

}  // namespace opial::cli
