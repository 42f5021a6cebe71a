#pragma once

#include <string>
#include <vector>

#include "app/config.hpp"
#include "isospec/base_problem.hpp"
#include "isospec/verify.hpp"

namespace isospec::app {

/// A rendered dataset waiting to be written.
struct Output {
    std::string path;
    std::string content;
};

struct VerifyOutcome {
    SpectralReport<double> report;
    Output output;
};

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

/// Two-column `x,V` CSV on a uniform grid (header and `#` comments allowed).
SampledFunction<double> load_potential_csv(const std::string& path);

BaseProblem<double> build_problem(const RunConfig& cfg);

std::string catalog_text();

std::vector<Output> run_family(const RunConfig& cfg);
std::vector<Output> run_sweep2d(const RunConfig& cfg);
VerifyOutcome run_verify(const RunConfig& cfg);
std::vector<Output> run_limits(const RunConfig& cfg);

/// Writes every output; throws io_error on failure. Files are written in order
/// from fully rendered buffers, with LF line endings.
void write_outputs(const std::vector<Output>& outputs);

} // namespace isospec::app
