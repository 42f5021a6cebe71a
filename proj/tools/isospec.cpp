// isospec: command-line driver for isospectral family datasets.
//
//   isospec catalog
//   isospec family   --preset fig1
//   isospec sweep2d  --preset fig3 --out mesh.csv
//   isospec verify   --config run.json
//   isospec limits   --config run.json --format json
//
// Exit status: 0 ok, 1 bad input, 2 verification failed, 3 I/O error.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "app/config.hpp"
#include "app/run.hpp"

namespace {

using namespace isospec;
using namespace isospec::app;

struct Options {
    std::string config;
    std::string preset;
    std::string out;
    std::string format;
};

int exit_code(ErrorCode code)
{
    switch (code) {
    case ErrorCode::io_error:
        return 3;
    case ErrorCode::unnormalized_input:
        return 2;
    default:
        return 1;
    }
}

RunConfig resolve(const Options& opt)
{
    RunConfig cfg;
    if (!opt.preset.empty())
        cfg = load_preset(opt.preset);
    else if (!opt.config.empty())
        cfg = load_config(opt.config);
    else
        throw Error(ErrorCode::validation_error, "one of --config or --preset is required");

    if (!opt.format.empty()) {
        const Format f = opt.format == "json" ? Format::json : Format::csv;
        if (f != cfg.format && opt.out.empty() && !cfg.output.empty())
            cfg.output = std::filesystem::path(cfg.output).replace_extension(f == Format::json ? ".json" : ".csv").string();
        cfg.format = f;
    }
    if (!opt.out.empty())
        cfg.output = opt.out;
    return cfg;
}

void report(const std::vector<Output>& outputs)
{
    for (const auto& o : outputs)
        std::cout << "wrote " << o.path << " (" << o.content.size() << " bytes)\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-parameter strictly isospectral potentials and zero modes"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* sub) {
        auto* cfg = sub->add_option("--config", opt.config, "JSON key-value run configuration");
        auto* pre = sub->add_option("--preset", opt.preset, "built-in configuration")
                        ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4", "fig5"}));
        cfg->excludes(pre);
        sub->add_option("--out", opt.out, "output path (overrides the configuration)");
        sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };

    auto* catalog = app.add_subcommand("catalog", "list built-in base problems");
    auto* family = app.add_subcommand("family", "potentials and zero modes for each parameter tuple");
    auto* sweep2d = app.add_subcommand("sweep2d", "zero mode at fixed x over a two-parameter mesh");
    auto* verify = app.add_subcommand("verify", "finite-difference isospectrality check");
    auto* limits = app.add_subcommand("limits", "masked Pursey and Abraham-Moses limit potentials");
    for (auto* sub : {family, sweep2d, verify, limits})
        add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (catalog->parsed()) {
            std::cout << catalog_text();
            return 0;
        }
        const RunConfig cfg = resolve(opt);
        if (verify->parsed()) {
            const auto outcome = run_verify(cfg);
            write_outputs({outcome.output});
            std::cout << "max |dE| = " << format_double(outcome.report.max_abs_diff) << " (tol "
                      << format_double(outcome.report.tolerance) << "), zero-mode residual "
                      << format_double(outcome.report.zero_mode_residual) << "\n";
            std::cout << (outcome.report.passed ? "PASS" : "FAIL") << " -> " << outcome.output.path << "\n";
            return outcome.report.passed ? 0 : 2;
        }
        std::vector<Output> outputs;
        if (family->parsed())
            outputs = run_family(cfg);
        else if (sweep2d->parsed())
            outputs = run_sweep2d(cfg);
        else
            outputs = run_limits(cfg);
        write_outputs(outputs);
        report(outputs);
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
