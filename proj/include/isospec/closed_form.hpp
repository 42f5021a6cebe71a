#pragma once

// Closed forms of the multi-parameter family. With e_k the elementary
// symmetric polynomials of lambda_1 .. lambda_i,
//     C1 = e_i,   C2 = e_0 + ... + e_{i-1},
// the depth-i zero mode and potential are
//     v = sqrt(prod lambda_j (lambda_j + 1)) u0 / (C1 + C2 Delta F)
//     V = V0 - 2 kappa D^2 ln(C1 + C2 Delta F)
// and prod lambda_j (lambda_j + 1) = C1 (C1 + C2).

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isospec/base_problem.hpp"
#include "isospec/chain.hpp"
#include "isospec/grid.hpp"

namespace isospec {

template <typename Scalar>
struct VieteCoefficients {
    Scalar c1;
    Scalar c2;
    std::optional<Scalar> lambda_eff;  // c1 / c2, absent when c2 == 0
    Scalar lambda_product;

    /// Coefficients of the denominator C1 + C2 Delta F.
    static VieteCoefficients from_c(Scalar c1, Scalar c2, Scalar lambda_product)
    {
        VieteCoefficients v{c1, c2, std::nullopt, lambda_product};
        if (c2 != Scalar(0))
            v.lambda_eff = c1 / c2;
        return v;
    }
};

/// Delta F = alpha + beta K(x) with K ranging over [-1, 1].
template <typename Scalar>
struct KinkDecomposition {
    Scalar alpha;
    Scalar beta;

    Scalar lower() const { return alpha - beta; }
    Scalar upper() const { return alpha + beta; }

    static KinkDecomposition unit() { return {Scalar(0.5), Scalar(0.5)}; }
};

/// e_0 .. e_i by the recurrence e_k <- e_k + lambda_j e_{k-1}.
template <typename Scalar>
std::vector<Scalar> elementary_symmetric(std::span<const Scalar> lambdas)
{
    if (lambdas.empty())
        throw Error(ErrorCode::empty_list, "elementary symmetric polynomials of an empty list");
    std::vector<Scalar> e(lambdas.size() + 1, Scalar(0));
    e[0] = Scalar(1);
    for (std::size_t j = 0; j < lambdas.size(); ++j)
        for (std::size_t k = j + 1; k >= 1; --k)
            e[k] += lambdas[j] * e[k - 1];
    return e;
}

template <typename Scalar>
std::vector<Scalar> elementary_symmetric(const std::vector<Scalar>& lambdas)
{
    return elementary_symmetric(std::span<const Scalar>(lambdas));
}

template <typename Scalar>
VieteCoefficients<Scalar> viete_coefficients(std::span<const Scalar> lambdas)
{
    if (lambdas.empty())
        throw Error(ErrorCode::empty_list, "viete coefficients of an empty list");
    Scalar product(1);
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        try {
            check_parameter(lambdas[j]);
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), j + 1);
        }
        product *= lambdas[j] * (lambdas[j] + Scalar(1));
    }
    const auto e = elementary_symmetric(lambdas);
    Scalar c2(0);
    for (std::size_t k = 0; k + 1 < e.size(); ++k)
        c2 += e[k];
    return VieteCoefficients<Scalar>::from_c(e.back(), c2, product);
}

template <typename Scalar>
VieteCoefficients<Scalar> viete_coefficients(const std::vector<Scalar>& lambdas)
{
    return viete_coefficients(std::span<const Scalar>(lambdas));
}

/// True iff lambda_eff lies in one of the allowed half-lines
/// lambda_eff > beta - alpha or lambda_eff < -(beta + alpha).
template <typename Scalar>
bool admissible(Scalar lambda_eff, const KinkDecomposition<Scalar>& kink)
{
    return lambda_eff > kink.beta - kink.alpha || lambda_eff < -(kink.beta + kink.alpha);
}

/// Endpoint sign test: C1 + C2 Delta F has no zero for Delta F in
/// [alpha - beta, alpha + beta]. The denominator is linear in Delta F.
template <typename Scalar>
bool denominator_admissible(const VieteCoefficients<Scalar>& c, const KinkDecomposition<Scalar>& kink)
{
    const Scalar lo = c.c1 + c.c2 * kink.lower();
    const Scalar hi = c.c1 + c.c2 * kink.upper();
    return (lo > Scalar(0) && hi > Scalar(0)) || (lo < Scalar(0) && hi < Scalar(0));
}

/// Reads a polynomial a_0 x^i + a_1 x^{i-1} + ... + a_i whose roots play the
/// role of the parameters. After dividing by a_0,
///     C1 = (-1)^i a_i,   C2 = sum_{k<i} (-1)^k a_k.
/// Roots need not be real; the denominator is checked over the kink range.
template <typename Scalar>
VieteCoefficients<Scalar> from_polynomial(std::span<const Scalar> a,
                                          const KinkDecomposition<Scalar>& kink = KinkDecomposition<Scalar>::unit())
{
    if (a.size() < 2)
        throw Error(ErrorCode::empty_list, "polynomial needs degree at least 1");
    if (a[0] == Scalar(0))
        throw Error(ErrorCode::zero_leading_coefficient, "leading coefficient a_0 is zero");
    const std::size_t degree = a.size() - 1;
    Scalar c2(0);
    Scalar sign(1);
    for (std::size_t k = 0; k < degree; ++k) {
        c2 += sign * (a[k] / a[0]);
        sign = -sign;
    }
    const Scalar c1 = sign * (a[degree] / a[0]);
    auto c = VieteCoefficients<Scalar>::from_c(c1, c2, c1 * (c1 + c2));
    if (!denominator_admissible(c, kink))
        throw Error(ErrorCode::inadmissible, "denominator C1 + C2 Delta F vanishes on the kink range");
    return c;
}

template <typename Scalar>
VieteCoefficients<Scalar> from_polynomial(const std::vector<Scalar>& a,
                                          const KinkDecomposition<Scalar>& kink = KinkDecomposition<Scalar>::unit())
{
    return from_polynomial(std::span<const Scalar>(a), kink);
}

template <typename Scalar>
KinkDecomposition<Scalar> kink_parameters(const SampledFunction<Scalar>& delta_f)
{
    const auto& v = delta_f.values();
    for (Index k = 1; k < v.size(); ++k)
        if (v[k] < v[k - 1])
            throw Error(ErrorCode::nonmonotone_input,
                        "running integral decreases at x = " + std::to_string(double(delta_f.grid().x(k))));
    const Scalar lo = v.minCoeff();
    const Scalar hi = v.maxCoeff();
    return {(hi + lo) / Scalar(2), (hi - lo) / Scalar(2)};
}

template <typename Scalar>
KinkDecomposition<Scalar> kink_parameters(const BaseProblem<Scalar>& bp)
{
    return kink_parameters(bp.delta_f());
}

/// K(x) = (Delta F(x) - alpha) / beta.
template <typename Scalar>
SampledFunction<Scalar> kink_profile(const SampledFunction<Scalar>& delta_f, const KinkDecomposition<Scalar>& kink)
{
    return SampledFunction<Scalar>(delta_f.grid(), (delta_f.values() - kink.alpha) / kink.beta);
}

namespace detail {

template <typename Scalar>
ArrayX<Scalar> closed_denominator(const BaseProblem<Scalar>& bp, const VieteCoefficients<Scalar>& c)
{
    if (!denominator_admissible(c, kink_parameters(bp)))
        throw Error(ErrorCode::singular_denominator, "C1 + C2 Delta F vanishes on the grid");
    return c.c1 + c.c2 * bp.delta_f().values();
}

} // namespace detail

/// sqrt(C1 (C1 + C2)) u0 / |C1 + C2 Delta F|.
template <typename Scalar>
SampledFunction<Scalar> closed_mode(const BaseProblem<Scalar>& bp, const VieteCoefficients<Scalar>& c)
{
    using std::sqrt;
    const auto den = detail::closed_denominator(bp, c);
    if (!(c.lambda_product > Scalar(0)))
        throw Error(ErrorCode::singular_denominator, "normalization constant C1 (C1 + C2) is not positive");
    return SampledFunction<Scalar>(bp.grid(), sqrt(c.lambda_product) * bp.ground_state().values() / den.abs());
}

template <typename Scalar>
SampledFunction<Scalar> closed_mode(const BaseProblem<Scalar>& bp, std::span<const Scalar> lambdas)
{
    for (const Scalar lambda : lambdas)
        check_parameter_for(bp, lambda);
    return closed_mode(bp, viete_coefficients(lambdas));
}

template <typename Scalar>
SampledFunction<Scalar> closed_mode(const BaseProblem<Scalar>& bp, const std::vector<Scalar>& lambdas)
{
    return closed_mode(bp, std::span<const Scalar>(lambdas));
}

/// V0 - 2 kappa D^2 ln(C1 + C2 Delta F). The expanded route evaluates
/// V0 - 4 kappa C2 u0 u0' / den + 2 kappa C2^2 u0^4 / den^2 with den = C1 + C2 Delta F.
template <typename Scalar>
SampledFunction<Scalar> closed_potential(const BaseProblem<Scalar>& bp, const VieteCoefficients<Scalar>& c,
                                         PotentialRoute route = PotentialRoute::expanded)
{
    using std::log1p;
    const auto den = detail::closed_denominator(bp, c);
    const Scalar kappa = bp.kinetic_scale();
    if (route == PotentialRoute::log_form) {
        // ln(den / C1); the constant drops under D^2
        const Scalar ratio = c.c2 / c.c1;
        const SampledFunction<Scalar> logs(
            bp.grid(), (ratio * bp.delta_f().values()).unaryExpr([](Scalar t) { return log1p(t); }).eval());
        return bp.potential() - (Scalar(2) * kappa) * second_derivative(logs);
    }
    const auto& u0 = bp.ground_state().values();
    const auto du0 = derivative(bp.ground_state());
    const ArrayX<Scalar> u0sq = u0 * u0;
    const ArrayX<Scalar> inv = c.c2 / den;
    ArrayX<Scalar> v = bp.potential().values() - Scalar(4) * kappa * u0 * du0.values() * inv
                     + Scalar(2) * kappa * u0sq * u0sq * inv * inv;
    return SampledFunction<Scalar>(bp.grid(), std::move(v));
}

template <typename Scalar>
SampledFunction<Scalar> closed_potential(const BaseProblem<Scalar>& bp, std::span<const Scalar> lambdas,
                                         PotentialRoute route = PotentialRoute::expanded)
{
    for (const Scalar lambda : lambdas)
        check_parameter_for(bp, lambda);
    return closed_potential(bp, viete_coefficients(lambdas), route);
}

template <typename Scalar>
SampledFunction<Scalar> closed_potential(const BaseProblem<Scalar>& bp, const std::vector<Scalar>& lambdas,
                                         PotentialRoute route = PotentialRoute::expanded)
{
    return closed_potential(bp, std::span<const Scalar>(lambdas), route);
}

/// Threshold below which the log argument of a limit potential is treated as singular.
inline constexpr double limit_mask_threshold = 1e-6;

namespace detail {

template <typename Scalar>
MaskedFunction<Scalar> log_limit(const BaseProblem<Scalar>& bp, const SampledFunction<Scalar>& argument)
{
    using std::log;
    using std::max;
    const Scalar thr(limit_mask_threshold);
    const Mask above = argument.values() >= thr;
    const SampledFunction<Scalar> logs = argument.map([thr](Scalar t) { return log(max(t, thr)); });
    Mask valid = stencil_interior(above);
    const auto v = bp.potential() - (Scalar(2) * bp.kinetic_scale()) * second_derivative(logs);
    ArrayX<Scalar> out = v.values();
    for (Index k = 0; k < out.size(); ++k)
        if (!valid[k])
            out[k] = Scalar(0);
    return {SampledFunction<Scalar>(bp.grid(), std::move(out)), std::move(valid)};
}

} // namespace detail

/// lambda_eff -> 0 endpoint: V0 - 2 kappa D^2 ln(Delta F), masked where
/// Delta F < 1e-6 (a left neighbourhood of x_min). Masked samples hold 0.
template <typename Scalar>
MaskedFunction<Scalar> pursey_limit_potential(const BaseProblem<Scalar>& bp)
{
    return detail::log_limit(bp, bp.delta_f());
}

/// lambda_eff -> -1 endpoint: V0 - 2 kappa D^2 ln(1 - Delta F), masked where
/// 1 - Delta F < 1e-6. The complement is integrated from the right.
template <typename Scalar>
MaskedFunction<Scalar> abraham_moses_limit_potential(const BaseProblem<Scalar>& bp)
{
    return detail::log_limit(bp, cumulative_integral_from_right(square(bp.ground_state())));
}

} // namespace isospec
