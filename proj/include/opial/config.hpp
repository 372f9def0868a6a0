#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "opial/func.hpp"
#include "opial/measure.hpp"
#include "opial/operators.hpp"
#include "opial/opial.hpp"

namespace opial::cli {

/// Invalid problem config. what() reads "<source>:<line>: <message>".
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& message)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

struct RandomFamily {
    std::uint64_t seed = 0;
    int count = 0;
    int pieces = 3;
};

struct SharpnessConfig {
    int budget = 500;
    int pieces = 6;
};

/// Parsed problem config. Measures and kernel are already validated library objects.
struct ProblemConfig {
    Interval interval{0.0, 1.0};
    Variant variant = Variant::theorem_two_measure;
    Measure mu0 = Measure::lebesgue(Interval(0.0, 1.0));
    Measure mu1 = Measure::lebesgue(Interval(0.0, 1.0));
    std::optional<TKernel> kernel;
    std::vector<ExponentPair> exponents;
    std::vector<ACFunction> functions;
    std::optional<RandomFamily> random;
    double tol = 1e-10;
    std::optional<std::uint64_t> seed;
    SharpnessConfig sharpness;
    std::optional<std::string> output;

    /// Explicit functions followed by the random family, if any.
    std::vector<ACFunction> all_functions() const;
};

/// Parses a JSON config document. `source` names it in error messages.
ProblemConfig parse_config(const std::string& text, const std::string& source = "config");
ProblemConfig load_config(const std::string& path);

/// Config-file form of an ACFunction: {"knots", "coefficients", "value_at_a"}.
nlohmann::json describe_function(const ACFunction& f);

}  // namespace opial::cli
