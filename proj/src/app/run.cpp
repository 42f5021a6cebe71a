#include "app/run.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "isospec/chain.hpp"
#include "isospec/closed_form.hpp"

namespace isospec::app {

namespace {

using ojson = nlohmann::ordered_json;

constexpr double normalization_check = 1e-6;

std::string default_output(const RunConfig& cfg, const char* stem)
{
    if (!cfg.output.empty())
        return cfg.output;
    return std::string(stem) + (cfg.format == Format::csv ? ".csv" : ".json");
}

// path "out/data.csv" + "_pursey" -> "out/data_pursey.csv"
std::string with_suffix(const std::string& path, const std::string& suffix)
{
    const std::filesystem::path p(path);
    auto name = p.stem().string() + suffix + p.extension().string();
    return (p.parent_path() / name).string();
}

std::string join_numbers(const std::vector<double>& v)
{
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += ",";
        s += format_double(v[i]);
    }
    return s + "]";
}

std::string grid_line(const Grid<double>& g)
{
    return "x_min=" + format_double(g.x_min()) + " x_max=" + format_double(g.x_max())
         + " n=" + std::to_string(g.size());
}

void append_header(std::string& out, const char* kind, const RunConfig& cfg, const BaseProblem<double>& bp)
{
    out += "# isospec ";
    out += kind;
    out += "\n# source: " + (cfg.source.empty() ? std::string("inline") : cfg.source) + "\n";
    out += "# problem: " + std::string(to_string(cfg.problem)) + "\n";
    out += "# grid: " + grid_line(bp.grid()) + "\n";
    out += "# kinetic_scale: " + format_double(bp.kinetic_scale()) + "\n";
    out += "# energy_shift: " + format_double(bp.energy_shift()) + "\n";
}

ojson metadata(const char* kind, const RunConfig& cfg, const BaseProblem<double>& bp)
{
    ojson m;
    m["kind"] = kind;
    m["source"] = cfg.source.empty() ? std::string("inline") : cfg.source;
    m["problem"] = std::string(to_string(cfg.problem));
    m["grid"] = {{"x_min", bp.grid().x_min()}, {"x_max", bp.grid().x_max()}, {"n", bp.grid().size()}};
    m["kinetic_scale"] = bp.kinetic_scale();
    m["energy_shift"] = bp.energy_shift();
    return m;
}

std::string dump(const ojson& doc) { return doc.dump(2) + "\n"; }

std::string lambda_eff_text(const VieteCoefficients<double>& c)
{
    return c.lambda_eff ? format_double(*c.lambda_eff) : std::string("inf");
}

ojson lambda_eff_json(const VieteCoefficients<double>& c)
{
    return c.lambda_eff ? ojson(*c.lambda_eff) : ojson(nullptr);
}

// Value of f at x: the sample itself when x is a grid point, otherwise a
// four-point Lagrange interpolant.
double value_at(const SampledFunction<double>& f, double x)
{
    const auto& g = f.grid();
    const Index k = g.nearest_index(x);
    if (std::abs(g.x(k) - x) <= 1e-9 * g.spacing())
        return f[k];
    Index lo = static_cast<Index>(std::floor((x - g.x_min()) / g.spacing())) - 1;
    lo = std::clamp<Index>(lo, 0, g.size() - 4);
    double sum = 0.0;
    for (Index i = lo; i < lo + 4; ++i) {
        double w = 1.0;
        for (Index j = lo; j < lo + 4; ++j)
            if (j != i)
                w *= (x - g.x(j)) / (g.x(i) - g.x(j));
        sum += w * f[i];
    }
    return sum;
}

VieteCoefficients<double> tuple_coefficients(const BaseProblem<double>& bp, const std::vector<double>& t)
{
    for (const double l : t)
        check_parameter_for(bp, l);
    return viete_coefficients(t);
}

std::string fixed_x_label(double x) { return format_double(x); }

} // namespace

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

SampledFunction<double> load_potential_csv(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::io_error, "cannot open potential file '" + path + "'");
    std::vector<double> xs, vs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw Error(ErrorCode::validation_error,
                        "potential file " + path + " line " + std::to_string(lineno) + ": expected 'x,V'");
        double x{}, v{};
        const auto* b = line.data();
        const auto rx = std::from_chars(b, b + comma, x);
        const auto rv = std::from_chars(b + comma + 1, b + line.size(), v);
        if (rx.ec != std::errc() || rv.ec != std::errc()) {
            if (xs.empty() && vs.empty())
                continue;  // header row
            throw Error(ErrorCode::validation_error,
                        "potential file " + path + " line " + std::to_string(lineno) + ": malformed number");
        }
        xs.push_back(x);
        vs.push_back(v);
    }
    if (xs.size() < 3)
        throw Error(ErrorCode::validation_error, "potential file " + path + ": needs at least 3 samples");
    const Grid<double> grid(xs.front(), xs.back(), static_cast<Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i] - grid.x(static_cast<Index>(i))) > 1e-9 * grid.spacing() * double(xs.size()))
            throw Error(ErrorCode::validation_error,
                        "potential file " + path + ": x samples are not uniformly spaced");
    ArrayX<double> values = Eigen::Map<const ArrayX<double>>(vs.data(), static_cast<Index>(vs.size()));
    return SampledFunction<double>(grid, std::move(values));
}

BaseProblem<double> build_problem(const RunConfig& cfg)
{
    switch (cfg.problem) {
    case ProblemKind::harmonic_oscillator:
        return harmonic_oscillator(make_grid(cfg.grid->x_min, cfg.grid->x_max, cfg.grid->n));
    case ProblemKind::reflectionless:
        return reflectionless_well(make_grid(cfg.grid->x_min, cfg.grid->x_max, cfg.grid->n));
    case ProblemKind::numeric: {
        const auto v = load_potential_csv(cfg.potential_file);
        if (cfg.grid) {
            const auto& g = v.grid();
            if (g.size() != cfg.grid->n || std::abs(g.x_min() - cfg.grid->x_min) > 1e-9 * g.spacing()
                || std::abs(g.x_max() - cfg.grid->x_max) > 1e-9 * g.spacing())
                throw Error(ErrorCode::validation_error, "field 'x_min': grid keys do not match the potential file");
        }
        return numeric_ground_state(v, cfg.kinetic_scale.value_or(0.5),
                                    cfg.half_line ? LineKind::half_line : LineKind::full_line);
    }
    }
    throw Error(ErrorCode::validation_error, "field 'problem': unknown problem");
}

std::string catalog_text()
{
    return "harmonic_oscillator  V0 = x^2/2 - 1/2, u0 = pi^(-1/4) exp(-x^2/2), kappa = 1/2 "
           "(hbar = m = omega = 1); grid must span [-8, 8]\n"
           "reflectionless       V0 = 1 - 2 sech^2 x, u0 = sech(x)/sqrt(2), kappa = 1; grid must span [-12, 12]\n"
           "numeric              lowest finite-difference eigenpair of a sampled potential (x,V CSV), "
           "shifted to zero energy\n";
}

std::vector<Output> run_family(const RunConfig& cfg)
{
    if (cfg.mode() != Mode::lambdas && cfg.mode() != Mode::sweep)
        throw Error(ErrorCode::validation_error, "field 'lambdas': family needs a parameter list or a sweep");
    const auto bp = build_problem(cfg);
    const auto tuples = cfg.tuples();
    const Index n = bp.grid().size();
    const auto stride = static_cast<Index>(cfg.output_stride);

    struct Member {
        std::vector<double> lambdas;
        VieteCoefficients<double> coeffs;
        SampledFunction<double> potential;
        SampledFunction<double> mode;
    };
    std::vector<Member> members;
    for (const auto& t : tuples) {
        const auto c = tuple_coefficients(bp, t);
        auto v = closed_mode(bp, c);
        const double norm2 = total_integral(square(v));
        if (std::abs(norm2 - 1.0) > normalization_check)
            throw Error(ErrorCode::unnormalized_input, "zero mode for lambdas " + join_numbers(t)
                                                           + " has int v^2 = " + format_double(norm2)
                                                           + "; refusing to write");
        members.push_back({t, c, closed_potential(bp, c), std::move(v)});
    }

    Output out{default_output(cfg, "family"), {}};
    if (cfg.format == Format::csv) {
        std::string& s = out.content;
        append_header(s, "family", cfg, bp);
        s += "# output_stride: " + std::to_string(stride) + "\n";
        s += "# units: x [length]; V0, V [energy]; v [length^-1/2]; lambda_eff [dimensionless]\n";
        for (std::size_t m = 0; m < members.size(); ++m)
            s += "# member " + std::to_string(m + 1) + ": lambdas=" + join_numbers(members[m].lambdas)
               + " c1=" + format_double(members[m].coeffs.c1) + " c2=" + format_double(members[m].coeffs.c2)
               + " lambda_eff=" + lambda_eff_text(members[m].coeffs) + "\n";
        s += "x,V0,V,v,lambda_eff\n";
        for (const auto& m : members) {
            const auto le = lambda_eff_text(m.coeffs);
            for (Index k = 0; k < n; k += stride) {
                s += format_double(bp.grid().x(k));
                s += ',';
                s += format_double(bp.potential()[k]);
                s += ',';
                s += format_double(m.potential[k]);
                s += ',';
                s += format_double(m.mode[k]);
                s += ',';
                s += le;
                s += '\n';
            }
        }
    } else {
        ojson doc;
        doc["metadata"] = metadata("family", cfg, bp);
        doc["metadata"]["output_stride"] = stride;
        std::vector<double> xs, v0;
        for (Index k = 0; k < n; k += stride) {
            xs.push_back(bp.grid().x(k));
            v0.push_back(bp.potential()[k]);
        }
        doc["x"] = xs;
        doc["V0"] = v0;
        doc["members"] = ojson::array();
        for (const auto& m : members) {
            std::vector<double> pv, mv;
            for (Index k = 0; k < n; k += stride) {
                pv.push_back(m.potential[k]);
                mv.push_back(m.mode[k]);
            }
            ojson j;
            j["lambdas"] = m.lambdas;
            j["c1"] = m.coeffs.c1;
            j["c2"] = m.coeffs.c2;
            j["lambda_eff"] = lambda_eff_json(m.coeffs);
            j["V"] = pv;
            j["v"] = mv;
            doc["members"].push_back(std::move(j));
        }
        out.content = dump(doc);
    }
    return {std::move(out)};
}

std::vector<Output> run_sweep2d(const RunConfig& cfg)
{
    if (cfg.mode() != Mode::sweep2d)
        throw Error(ErrorCode::validation_error, "field 'fixed_x': sweep2d needs lambda1_*, lambda2_* and fixed_x");
    const auto bp = build_problem(cfg);
    const auto& s = *cfg.sweep2d;
    const auto l1 = s.lambda1.values();
    const auto l2 = s.lambda2.values();

    std::vector<Output> outputs;
    const std::string base = default_output(cfg, "sweep2d");
    for (const double x : s.fixed_x) {
        if (!bp.grid().contains(x))
            throw Error(ErrorCode::fixed_x_outside_grid, "fixed x = " + format_double(x) + " lies outside the grid");
        const double u0x = value_at(bp.ground_state(), x);
        const double dfx = value_at(bp.delta_f(), x);

        struct Row {
            double a, b, v;
        };
        std::vector<Row> rows;
        rows.reserve(l1.size() * l2.size());
        for (const double a : l1)
            for (const double b : l2) {
                const auto c = tuple_coefficients(bp, {a, b});
                rows.push_back({a, b, std::sqrt(c.lambda_product) * u0x / (c.c1 + c.c2 * dfx)});
            }

        Output out{s.fixed_x.size() == 1 ? base : with_suffix(base, "_x" + fixed_x_label(x)), {}};
        if (cfg.format == Format::csv) {
            std::string& t = out.content;
            append_header(t, "sweep2d", cfg, bp);
            t += "# fixed_x: " + format_double(x) + "\n";
            t += "# units: lambda1, lambda2 [dimensionless]; v_at_x [length^-1/2]\n";
            t += "lambda1,lambda2,v_at_x\n";
            for (const auto& r : rows) {
                t += format_double(r.a);
                t += ',';
                t += format_double(r.b);
                t += ',';
                t += format_double(r.v);
                t += '\n';
            }
        } else {
            ojson doc;
            doc["metadata"] = metadata("sweep2d", cfg, bp);
            doc["metadata"]["fixed_x"] = x;
            doc["lambda1"] = l1;
            doc["lambda2"] = l2;
            ojson table = ojson::array();
            for (const auto& r : rows)
                table.push_back({r.a, r.b, r.v});
            doc["rows"] = std::move(table);
            out.content = dump(doc);
        }
        outputs.push_back(std::move(out));
    }
    return outputs;
}

VerifyOutcome run_verify(const RunConfig& cfg)
{
    if (cfg.mode() != Mode::lambdas)
        throw Error(ErrorCode::validation_error, "field 'lambdas': verify needs a single parameter list");
    const auto bp = build_problem(cfg);
    const VerifySpec spec = cfg.verify.value_or(VerifySpec{});
    VerifyOptions<double> options;
    if (spec.perturbation != 0.0) {
        const double a = spec.perturbation;
        options.perturbation = SampledFunction<double>::sample(bp.grid(), [a](double x) { return a * std::exp(-x * x); });
    }
    auto report = verify_isospectral(bp, cfg.lambdas, spec.k, spec.tol, options);

    ojson doc;
    doc["metadata"] = metadata("verify", cfg, bp);
    doc["parameters"] = report.parameters;
    doc["k"] = report.k;
    doc["tolerance"] = report.tolerance;
    doc["extrapolated"] = report.extrapolated;
    doc["base_levels"] = report.base_levels;
    doc["deformed_levels"] = report.deformed_levels;
    doc["max_abs_diff"] = report.max_abs_diff;
    doc["raw_base_levels"] = report.raw_base_levels;
    doc["raw_deformed_levels"] = report.raw_deformed_levels;
    doc["raw_max_abs_diff"] = report.raw_max_abs_diff;
    doc["zero_mode_residual"] = report.zero_mode_residual;
    doc["perturbation"] = spec.perturbation;
    doc["passed"] = report.passed;

    std::string path = cfg.output.empty() ? std::string("verify.json") : cfg.output;
    return {std::move(report), {std::move(path), dump(doc)}};
}

std::vector<Output> run_limits(const RunConfig& cfg)
{
    const auto bp = build_problem(cfg);
    const auto stride = static_cast<Index>(cfg.output_stride);
    const Index n = bp.grid().size();
    const auto pursey = pursey_limit_potential(bp);
    const auto am = abraham_moses_limit_potential(bp);
    const std::string base = default_output(cfg, "limits");

    auto render_csv = [&](const MaskedFunction<double>& f, const char* which) {
        std::string s;
        append_header(s, "limits", cfg, bp);
        s += std::string("# limit: ") + which + "\n";
        s += "# mask: 1 where V_limit is valid, 0 near the singular endpoint (V_limit written as 0 there)\n";
        s += "# units: x [length]; V0, V_limit [energy]\n";
        s += "x,V0,V_limit,mask\n";
        for (Index k = 0; k < n; k += stride) {
            s += format_double(bp.grid().x(k));
            s += ',';
            s += format_double(bp.potential()[k]);
            s += ',';
            s += format_double(f.function[k]);
            s += ',';
            s += f.valid[k] ? '1' : '0';
            s += '\n';
        }
        return s;
    };

    if (cfg.format == Format::csv)
        return {{with_suffix(base, "_pursey"), render_csv(pursey, "pursey (lambda_eff -> 0)")},
                {with_suffix(base, "_abraham_moses"), render_csv(am, "abraham_moses (lambda_eff -> -1)")}};

    ojson doc;
    doc["metadata"] = metadata("limits", cfg, bp);
    doc["metadata"]["output_stride"] = stride;
    std::vector<double> xs, v0, vp, va;
    std::vector<int> mp, ma;
    for (Index k = 0; k < n; k += stride) {
        xs.push_back(bp.grid().x(k));
        v0.push_back(bp.potential()[k]);
        vp.push_back(pursey.function[k]);
        mp.push_back(pursey.valid[k] ? 1 : 0);
        va.push_back(am.function[k]);
        ma.push_back(am.valid[k] ? 1 : 0);
    }
    doc["x"] = xs;
    doc["V0"] = v0;
    doc["pursey"] = {{"V_limit", vp}, {"mask", mp}};
    doc["abraham_moses"] = {{"V_limit", va}, {"mask", ma}};
    return {{base, dump(doc)}};
}

void write_outputs(const std::vector<Output>& outputs)
{
    for (const auto& o : outputs) {
        std::ofstream f(o.path, std::ios::binary | std::ios::trunc);
        if (!f)
            throw Error(ErrorCode::io_error, "cannot open '" + o.path + "' for writing");
        f.write(o.content.data(), static_cast<std::streamsize>(o.content.size()));
        if (!f)
            throw Error(ErrorCode::io_error, "failed writing '" + o.path + "'");
    }
}

} // namespace isospec::app
