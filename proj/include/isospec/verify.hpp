#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "isospec/closed_form.hpp"
#include "isospec/spectral.hpp"

namespace isospec {

/// Outcome of comparing the lowest levels of V0 and of a deformed member.
///
/// Both spectra come from the same grid and the same solver. The headline
/// comparison uses Richardson-extrapolated levels (grid and its
/// every-other-point subgrid), which removes the O(h^2) bias of the
/// three-point Laplacian; the plain three-point levels are kept alongside.
template <typename Scalar>
struct SpectralReport {
    std::vector<Scalar> parameters;
    Index k = 0;
    Scalar tolerance{};
    std::vector<Scalar> base_levels;
    std::vector<Scalar> deformed_levels;
    Scalar max_abs_diff{};
    std::vector<Scalar> raw_base_levels;
    std::vector<Scalar> raw_deformed_levels;
    Scalar raw_max_abs_diff{};
    bool extrapolated = false;
    Scalar zero_mode_residual{};
    bool passed = false;
};

template <typename Scalar>
struct VerifyOptions {
    bool extrapolate = true;
    /// Added to the deformed potential before diagonalization. Used to run
    /// negative controls.
    std::optional<SampledFunction<Scalar>> perturbation;
};

namespace detail {

template <typename Scalar>
Scalar max_abs_diff(const std::vector<Scalar>& a, const std::vector<Scalar>& b)
{
    using std::abs;
    Scalar m(0);
    for (std::size_t j = 0; j < a.size(); ++j)
        m = std::max(m, abs(a[j] - b[j]));
    return m;
}

} // namespace detail

template <typename Scalar>
SpectralReport<Scalar> verify_isospectral(const BaseProblem<Scalar>& bp, const std::vector<Scalar>& lambdas, Index k,
                                          Scalar tol, const VerifyOptions<Scalar>& options = {})
{
    SampledFunction<Scalar> deformed(bp.grid());
    SampledFunction<Scalar> mode(bp.grid());
    try {
        deformed = closed_potential(bp, lambdas);
        mode = closed_mode(bp, lambdas);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::forbidden_parameter || e.code() == ErrorCode::singular_denominator
            || e.code() == ErrorCode::empty_list)
            throw Error(ErrorCode::inadmissible, e.what());
        throw;
    }
    if (options.perturbation)
        deformed = deformed + *options.perturbation;

    const Scalar kappa = bp.kinetic_scale();
    SpectralReport<Scalar> r;
    r.parameters = lambdas;
    r.k = k;
    r.tolerance = tol;
    r.raw_base_levels = lowest_eigenvalues(discretize(bp.potential(), kappa), k, Scalar(1e-11));
    r.raw_deformed_levels = lowest_eigenvalues(discretize(deformed, kappa), k, Scalar(1e-11));
    r.raw_max_abs_diff = detail::max_abs_diff(r.raw_base_levels, r.raw_deformed_levels);
    r.extrapolated = options.extrapolate && bp.grid().has_coarse() && bp.grid().coarse().size() - 2 >= k;
    if (r.extrapolated) {
        r.base_levels = extrapolated_levels(bp.potential(), kappa, k);
        r.deformed_levels = extrapolated_levels(deformed, kappa, k);
    } else {
        r.base_levels = r.raw_base_levels;
        r.deformed_levels = r.raw_deformed_levels;
    }
    r.max_abs_diff = detail::max_abs_diff(r.base_levels, r.deformed_levels);
    r.zero_mode_residual = zero_mode_residual(deformed, mode, kappa);
    r.passed = r.max_abs_diff <= tol;
    return r;
}

} // namespace isospec
