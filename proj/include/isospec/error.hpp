#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace isospec {

enum class ErrorCode {
    invalid_bounds,
    too_few_points,
    grid_mismatch,
    non_finite,
    zero_norm,
    domain_too_small,
    no_gap,
    nodal_ground_state,
    invalid_base_problem,
    forbidden_parameter,
    denominator_vanishes,
    unnormalized_input,
    empty_list,
    singular_denominator,
    zero_leading_coefficient,
    inadmissible,
    nonmonotone_input,
    k_out_of_range,
    empty_mask,
    parse_error,
    validation_error,
    io_error,
    fixed_x_outside_grid,
};

constexpr std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::invalid_bounds: return "invalid-bounds";
    case ErrorCode::too_few_points: return "too-few-points";
    case ErrorCode::grid_mismatch: return "grid-mismatch";
    case ErrorCode::non_finite: return "non-finite";
    case ErrorCode::zero_norm: return "zero-norm";
    case ErrorCode::domain_too_small: return "domain-too-small";
    case ErrorCode::no_gap: return "no-gap";
    case ErrorCode::nodal_ground_state: return "nodal-ground-state";
    case ErrorCode::invalid_base_problem: return "invalid-base-problem";
    case ErrorCode::forbidden_parameter: return "forbidden-parameter";
    case ErrorCode::denominator_vanishes: return "denominator-vanishes";
    case ErrorCode::unnormalized_input: return "unnormalized-input";
    case ErrorCode::empty_list: return "empty-list";
    case ErrorCode::singular_denominator: return "singular-denominator";
    case ErrorCode::zero_leading_coefficient: return "zero-leading-coefficient";
    case ErrorCode::inadmissible: return "inadmissible";
    case ErrorCode::nonmonotone_input: return "nonmonotone-input";
    case ErrorCode::k_out_of_range: return "k-out-of-range";
    case ErrorCode::empty_mask: return "empty-mask";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::validation_error: return "validation-error";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::fixed_x_outside_grid: return "fixed-x-outside-grid";
    }
    return "unknown";
}

/// Every failure raised by the library carries a machine-readable code.
/// Errors raised while folding a parameter chain also record the 1-based
/// depth of the failing step.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    Error(ErrorCode code, const std::string& what, std::size_t depth)
        : std::runtime_error(std::string(to_string(code)) + " at depth " + std::to_string(depth)
                             + ": " + what),
          code_(code), depth_(depth)
    {
    }

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> depth() const noexcept { return depth_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> depth_;
};

} // namespace isospec
