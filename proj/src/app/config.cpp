#include "app/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "isospec/chain.hpp"
#include "isospec/closed_form.hpp"
#include "isospec/error.hpp"
#include "isospec/grid.hpp"

namespace isospec::app {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& key, const std::string& reason)
{
    throw Error(ErrorCode::validation_error, "field '" + key + "': " + reason);
}

const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys{
        "problem",      "potential_file", "half_line",     "x_min",         "x_max",
        "n",            "kinetic_scale",  "lambdas",       "sweep_index",   "sweep_values",
        "sweep_min",    "sweep_max",      "sweep_count",   "lambda1_min",   "lambda1_max",
        "lambda1_count", "lambda2_min",   "lambda2_max",   "lambda2_count", "fixed_x",
        "verify_k",     "verify_tol",     "verify_perturbation", "output",  "format",
        "output_stride", "description",
    };
    return keys;
}

double get_number(const json& doc, const std::string& key)
{
    const auto& v = doc.at(key);
    if (!v.is_number())
        invalid(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        invalid(key, "expected a finite number");
    return d;
}

long get_integer(const json& doc, const std::string& key)
{
    const auto& v = doc.at(key);
    if (!v.is_number_integer())
        invalid(key, "expected an integer");
    return v.get<long>();
}

std::size_t get_count(const json& doc, const std::string& key)
{
    const long c = get_integer(doc, key);
    if (c < 1)
        invalid(key, "expected a positive count");
    return static_cast<std::size_t>(c);
}

std::vector<double> get_number_list(const json& doc, const std::string& key)
{
    const auto& v = doc.at(key);
    if (!v.is_array())
        invalid(key, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            invalid(key + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(v[i].get<double>());
        if (!std::isfinite(out.back()))
            invalid(key + "[" + std::to_string(i) + "]", "expected a finite number");
    }
    return out;
}

std::string get_string(const json& doc, const std::string& key)
{
    const auto& v = doc.at(key);
    if (!v.is_string())
        invalid(key, "expected a string");
    return v.get<std::string>();
}

std::string format_number(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void check_lambda(const std::string& key, double lambda, bool half_line)
{
    if (is_forbidden(lambda))
        invalid(key, "parameter " + format_number(lambda) + " in deleted interval [-1,0]");
    if (half_line && !(lambda > 0.0))
        invalid(key, "half-line problems require positive parameters");
}

// The tuple-level condition: C1 + C2 Delta F keeps one sign on Delta F in
// [0, 1] and lambda_eff lies in an allowed interval.
void check_tuple(const std::string& key, const std::vector<double>& lambdas)
{
    const auto c = viete_coefficients(lambdas);
    const auto kink = KinkDecomposition<double>::unit();
    if (!denominator_admissible(c, kink))
        invalid(key, "denominator C1 + C2 Delta F vanishes for this parameter set");
    if (c.lambda_eff && !admissible(*c.lambda_eff, kink))
        invalid(key, "effective parameter " + format_number(*c.lambda_eff) + " is not admissible");
}

Range get_range(const json& doc, const std::string& prefix)
{
    const std::string kmin = prefix + "_min", kmax = prefix + "_max", kcount = prefix + "_count";
    for (const auto& k : {kmin, kmax, kcount})
        if (!doc.contains(k))
            invalid(k, "required when any of " + prefix + "_min/_max/_count is given");
    Range r{get_number(doc, kmin), get_number(doc, kmax), get_count(doc, kcount)};
    if (r.max < r.min)
        invalid(kmax, "must not be below " + kmin);
    if (r.count == 1 && r.max != r.min)
        invalid(kcount, "a single-point range needs equal min and max");
    return r;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

} // namespace

std::vector<double> Range::values() const
{
    std::vector<double> v(count);
    if (count == 1) {
        v[0] = min;
        return v;
    }
    const double step = (max - min) / double(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        v[i] = min + double(i) * step;
    v.back() = max;
    return v;
}

Mode RunConfig::mode() const
{
    if (sweep2d)
        return Mode::sweep2d;
    if (sweep)
        return Mode::sweep;
    if (!lambdas.empty())
        return Mode::lambdas;
    return Mode::none;
}

std::vector<std::vector<double>> RunConfig::tuples() const
{
    switch (mode()) {
    case Mode::lambdas: return {lambdas};
    case Mode::sweep: {
        std::vector<std::vector<double>> out;
        for (const double v : sweep->values) {
            auto t = lambdas;
            t[sweep->param_index] = v;
            out.push_back(std::move(t));
        }
        return out;
    }
    case Mode::sweep2d: {
        std::vector<std::vector<double>> out;
        for (const double a : sweep2d->lambda1.values())
            for (const double b : sweep2d->lambda2.values())
                out.push_back({a, b});
        return out;
    }
    case Mode::none: break;
    }
    return {};
}

RunConfig parse_config(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte);
        throw Error(ErrorCode::parse_error, "line " + std::to_string(line) + ", column " + std::to_string(col)
                                                + ": malformed configuration document");
    }
    if (!doc.is_object())
        throw Error(ErrorCode::parse_error, "line 1, column 1: configuration must be a JSON object");
    for (const auto& [key, value] : doc.items())
        if (!known_keys().contains(key))
            invalid(key, "unknown key");

    RunConfig cfg;
    if (!doc.contains("problem"))
        invalid("problem", "missing required key");
    const std::string problem = get_string(doc, "problem");
    if (problem == "harmonic_oscillator")
        cfg.problem = ProblemKind::harmonic_oscillator;
    else if (problem == "reflectionless")
        cfg.problem = ProblemKind::reflectionless;
    else if (problem == "numeric")
        cfg.problem = ProblemKind::numeric;
    else
        invalid("problem", "expected harmonic_oscillator, reflectionless or numeric, got '" + problem + "'");

    if (cfg.problem == ProblemKind::numeric) {
        if (!doc.contains("potential_file"))
            invalid("potential_file", "required for numeric problems");
        cfg.potential_file = get_string(doc, "potential_file");
        if (doc.contains("half_line")) {
            if (!doc["half_line"].is_boolean())
                invalid("half_line", "expected true or false");
            cfg.half_line = doc["half_line"].get<bool>();
        }
    } else {
        for (const char* k : {"potential_file", "half_line"})
            if (doc.contains(k))
                invalid(k, "only meaningful for numeric problems");
    }

    const bool any_grid = doc.contains("x_min") || doc.contains("x_max") || doc.contains("n");
    if (any_grid) {
        GridSpec g;
        for (const char* k : {"x_min", "x_max", "n"})
            if (!doc.contains(k))
                invalid(k, "grid needs x_min, x_max and n together");
        g.x_min = get_number(doc, "x_min");
        g.x_max = get_number(doc, "x_max");
        g.n = get_integer(doc, "n");
        if (g.n < 3)
            invalid("n", "grid needs at least 3 points");
        if (!(g.x_min < g.x_max))
            invalid("x_max", "must exceed x_min");
        cfg.grid = g;
    } else if (cfg.problem == ProblemKind::harmonic_oscillator) {
        cfg.grid = GridSpec{-10.0, 10.0, 4001};
    } else if (cfg.problem == ProblemKind::reflectionless) {
        cfg.grid = GridSpec{-12.0, 12.0, 4801};
    }
    if (cfg.problem != ProblemKind::numeric) {
        const double span = cfg.problem == ProblemKind::harmonic_oscillator ? 8.0 : 12.0;
        if (cfg.grid->x_min > -span)
            invalid("x_min", "must be at most " + format_number(-span) + " for " + problem);
        if (cfg.grid->x_max < span)
            invalid("x_max", "must be at least " + format_number(span) + " for " + problem);
    }

    if (doc.contains("kinetic_scale")) {
        const double kappa = get_number(doc, "kinetic_scale");
        if (!(kappa > 0.0))
            invalid("kinetic_scale", "must be positive");
        const double fixed = cfg.problem == ProblemKind::harmonic_oscillator ? 0.5 : 1.0;
        if (cfg.problem != ProblemKind::numeric && kappa != fixed)
            invalid("kinetic_scale", "is fixed at " + format_number(fixed) + " for " + problem);
        cfg.kinetic_scale = kappa;
    }

    if (doc.contains("lambdas")) {
        cfg.lambdas = get_number_list(doc, "lambdas");
        if (cfg.lambdas.empty())
            invalid("lambdas", "must not be empty");
        for (std::size_t i = 0; i < cfg.lambdas.size(); ++i)
            check_lambda("lambdas[" + std::to_string(i) + "]", cfg.lambdas[i], cfg.half_line);
    }

    const bool any_sweep = doc.contains("sweep_index") || doc.contains("sweep_values") || doc.contains("sweep_min")
                        || doc.contains("sweep_max") || doc.contains("sweep_count");
    const bool any_sweep2d = doc.contains("lambda1_min") || doc.contains("lambda1_max")
                          || doc.contains("lambda1_count") || doc.contains("lambda2_min")
                          || doc.contains("lambda2_max") || doc.contains("lambda2_count") || doc.contains("fixed_x");
    if (any_sweep && any_sweep2d)
        invalid("sweep_index", "sweep and sweep2d modes are mutually exclusive");

    if (any_sweep) {
        if (cfg.lambdas.empty())
            invalid("lambdas", "a sweep needs the base parameter list");
        if (!doc.contains("sweep_index"))
            invalid("sweep_index", "required for a sweep");
        Sweep s;
        const long idx = get_integer(doc, "sweep_index");
        if (idx < 0 || static_cast<std::size_t>(idx) >= cfg.lambdas.size())
            invalid("sweep_index", "out of range for lambdas of length " + std::to_string(cfg.lambdas.size()));
        s.param_index = static_cast<std::size_t>(idx);
        if (doc.contains("sweep_values")) {
            if (doc.contains("sweep_min") || doc.contains("sweep_max") || doc.contains("sweep_count"))
                invalid("sweep_values", "give either sweep_values or sweep_min/_max/_count");
            s.values = get_number_list(doc, "sweep_values");
            if (s.values.empty())
                invalid("sweep_values", "must not be empty");
        } else {
            s.values = get_range(doc, "sweep").values();
        }
        for (std::size_t i = 0; i < s.values.size(); ++i)
            check_lambda("sweep_values[" + std::to_string(i) + "]", s.values[i], cfg.half_line);
        cfg.sweep = std::move(s);
    }

    if (any_sweep2d) {
        if (!cfg.lambdas.empty())
            invalid("lambdas", "sweep2d mode takes its parameters from lambda1_*/lambda2_*");
        Sweep2d s;
        s.lambda1 = get_range(doc, "lambda1");
        s.lambda2 = get_range(doc, "lambda2");
        if (!doc.contains("fixed_x"))
            invalid("fixed_x", "required for sweep2d");
        s.fixed_x = get_number_list(doc, "fixed_x");
        if (s.fixed_x.empty())
            invalid("fixed_x", "must not be empty");
        if (cfg.grid)
            for (std::size_t i = 0; i < s.fixed_x.size(); ++i)
                if (s.fixed_x[i] < cfg.grid->x_min || s.fixed_x[i] > cfg.grid->x_max)
                    invalid("fixed_x[" + std::to_string(i) + "]", "outside the grid");
        const auto v1 = s.lambda1.values();
        const auto v2 = s.lambda2.values();
        for (std::size_t i = 0; i < v1.size(); ++i)
            check_lambda("lambda1 (value " + format_number(v1[i]) + ")", v1[i], cfg.half_line);
        for (std::size_t i = 0; i < v2.size(); ++i)
            check_lambda("lambda2 (value " + format_number(v2[i]) + ")", v2[i], cfg.half_line);
        cfg.sweep2d = std::move(s);
    }

    const auto tuples = cfg.tuples();
    for (std::size_t t = 0; t < tuples.size(); ++t) {
        const std::string key = cfg.mode() == Mode::lambdas ? std::string("lambdas")
                              : cfg.mode() == Mode::sweep   ? "sweep_values[" + std::to_string(t) + "]"
                                                            : std::string("lambda1/lambda2 mesh");
        check_tuple(key, tuples[t]);
    }

    const bool any_verify = doc.contains("verify_k") || doc.contains("verify_tol") || doc.contains("verify_perturbation");
    if (any_verify) {
        VerifySpec v;
        if (doc.contains("verify_k")) {
            v.k = get_integer(doc, "verify_k");
            if (v.k < 1)
                invalid("verify_k", "must be at least 1");
        }
        if (doc.contains("verify_tol")) {
            v.tol = get_number(doc, "verify_tol");
            if (!(v.tol > 0.0))
                invalid("verify_tol", "must be positive");
        }
        if (doc.contains("verify_perturbation"))
            v.perturbation = get_number(doc, "verify_perturbation");
        cfg.verify = v;
    }

    if (doc.contains("output"))
        cfg.output = get_string(doc, "output");
    if (doc.contains("format")) {
        const std::string f = get_string(doc, "format");
        if (f == "csv")
            cfg.format = Format::csv;
        else if (f == "json")
            cfg.format = Format::json;
        else
            invalid("format", "expected csv or json, got '" + f + "'");
    }
    if (doc.contains("output_stride"))
        cfg.output_stride = get_count(doc, "output_stride");
    if (doc.contains("description"))
        (void)get_string(doc, "description");
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::io_error, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    auto cfg = parse_config(buf.str());
    cfg.source = path;
    return cfg;
}

namespace {

constexpr std::string_view fig1 = R"({
  "description": "two-parameter oscillator potentials, lambda2 = 0.2, lambda1 swept over [0.1, 5]",
  "problem": "harmonic_oscillator",
  "x_min": -10, "x_max": 10, "n": 4001,
  "lambdas": [0.1, 0.2],
  "sweep_index": 0, "sweep_min": 0.1, "sweep_max": 5, "sweep_count": 50,
  "output": "fig1_potentials.csv", "format": "csv", "output_stride": 10
})";

constexpr std::string_view fig2 = R"({
  "description": "zero modes of the fig1 family",
  "problem": "harmonic_oscillator",
  "x_min": -10, "x_max": 10, "n": 4001,
  "lambdas": [0.1, 0.2],
  "sweep_index": 0, "sweep_min": 0.1, "sweep_max": 5, "sweep_count": 50,
  "output": "fig2_zero_modes.csv", "format": "csv", "output_stride": 10
})";

constexpr std::string_view fig3 = R"({
  "description": "two-parameter zero modes at x = -1.4 over the (lambda1, lambda2) mesh",
  "problem": "harmonic_oscillator",
  "x_min": -10, "x_max": 10, "n": 4001,
  "lambda1_min": 0.1, "lambda1_max": 5, "lambda1_count": 50,
  "lambda2_min": 0.1, "lambda2_max": 5, "lambda2_count": 50,
  "fixed_x": [-1.4],
  "output": "fig3_modes_x-1.4.csv", "format": "csv"
})";

constexpr std::string_view fig4 = R"({
  "description": "two-parameter zero modes at x = -1.6 over the (lambda1, lambda2) mesh",
  "problem": "harmonic_oscillator",
  "x_min": -10, "x_max": 10, "n": 4001,
  "lambda1_min": 0.1, "lambda1_max": 5, "lambda1_count": 50,
  "lambda2_min": 0.1, "lambda2_max": 5, "lambda2_count": 50,
  "fixed_x": [-1.6],
  "output": "fig4_modes_x-1.6.csv", "format": "csv"
})";

constexpr std::string_view fig5 = R"({
  "description": "two-parameter zero modes at x = -1.8 over the (lambda1, lambda2) mesh",
  "problem": "harmonic_oscillator",
  "x_min": -10, "x_max": 10, "n": 4001,
  "lambda1_min": 0.1, "lambda1_max": 5, "lambda1_count": 50,
  "lambda2_min": 0.1, "lambda2_max": 5, "lambda2_count": 50,
  "fixed_x": [-1.8],
  "output": "fig5_modes_x-1.8.csv", "format": "csv"
})";

} // namespace

std::vector<std::string_view> preset_names() { return {"fig1", "fig2", "fig3", "fig4", "fig5"}; }

std::string_view preset_text(std::string_view name)
{
    if (name == "fig1")
        return fig1;
    if (name == "fig2")
        return fig2;
    if (name == "fig3")
        return fig3;
    if (name == "fig4")
        return fig4;
    if (name == "fig5")
        return fig5;
    throw Error(ErrorCode::validation_error, "field 'preset': unknown preset '" + std::string(name) + "'");
}

RunConfig load_preset(std::string_view name)
{
    auto cfg = parse_config(preset_text(name));
    cfg.source = "preset " + std::string(name);
    return cfg;
}

std::string_view to_string(ProblemKind kind)
{
    switch (kind) {
    case ProblemKind::harmonic_oscillator: return "harmonic_oscillator";
    case ProblemKind::reflectionless: return "reflectionless";
    case ProblemKind::numeric: return "numeric";
    }
    return "unknown";
}

std::string_view to_string(Format format) { return format == Format::csv ? "csv" : "json"; }

} // namespace isospec::app
