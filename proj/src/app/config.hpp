#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace isospec::app {

enum class ProblemKind { harmonic_oscillator, reflectionless, numeric };
enum class Format { csv, json };
enum class Mode { none, lambdas, sweep, sweep2d };

struct GridSpec {
    double x_min = -10.0;
    double x_max = 10.0;
    long n = 4001;
};

/// Inclusive linear range with count >= 1 points; the last point is max exactly.
struct Range {
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 1;

    std::vector<double> values() const;
};

struct Sweep {
    std::size_t param_index = 0;
    std::vector<double> values;
};

struct Sweep2d {
    Range lambda1;
    Range lambda2;
    std::vector<double> fixed_x;
};

struct VerifySpec {
    long k = 6;
    double tol = 1e-6;
    /// Amplitude of a Gaussian bump a exp(-x^2) added to the deformed
    /// potential; a negative-control hook, 0 in normal runs.
    double perturbation = 0.0;
};

struct RunConfig {
    ProblemKind problem = ProblemKind::harmonic_oscillator;
    std::string potential_file;
    bool half_line = false;
    std::optional<GridSpec> grid;
    std::optional<double> kinetic_scale;
    std::vector<double> lambdas;
    std::optional<Sweep> sweep;
    std::optional<Sweep2d> sweep2d;
    std::optional<VerifySpec> verify;
    std::string output;
    Format format = Format::csv;
    std::size_t output_stride = 1;
    std::string source;  // preset name or config path, echoed into metadata

    Mode mode() const;
    /// Every parameter tuple the run visits, in output order (family modes).
    std::vector<std::vector<double>> tuples() const;
};

/// Parses the flat JSON key-value document described in the README.
/// Throws isospec::Error with parse_error (line/column) or validation_error
/// (naming the offending key).
RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::string& path);

/// Built-in documents for fig1 .. fig5.
std::string_view preset_text(std::string_view name);
std::vector<std::string_view> preset_names();
RunConfig load_preset(std::string_view name);

std::string_view to_string(ProblemKind kind);
std::string_view to_string(Format format);

} // namespace isospec::app
