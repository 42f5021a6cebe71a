#pragma once

// Iterated Darboux construction at zero factorization energy.
//
// One step maps a normalized zero mode v of potential V to
//     v_lambda = sqrt(lambda (lambda + 1)) v / (lambda + I),   I = int_c^x v^2
//     V_lambda = V - 2 kappa D^2 ln(lambda + I)
// and v_lambda is again a normalized zero mode of V_lambda. The parameter
// must lie outside the closed interval [-1, 0].

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isospec/base_problem.hpp"
#include "isospec/grid.hpp"

namespace isospec {

/// Tolerance on int v^2 = 1 accepted for inputs to a chain step.
inline constexpr double normalization_tolerance = 1e-6;

enum class PotentialRoute {
    log_form,  // V0 - 2 kappa D^2 ln(denominator)
    expanded,  // V0 - 4 kappa C u0 u0' / den + 2 kappa C^2 u0^4 / den^2
};

template <typename Scalar>
bool is_forbidden(Scalar lambda)
{
    return lambda >= Scalar(-1) && lambda <= Scalar(0);
}

template <typename Scalar>
void check_parameter(Scalar lambda)
{
    using std::isfinite;
    if (!isfinite(lambda))
        throw Error(ErrorCode::forbidden_parameter, "parameter must be finite");
    if (is_forbidden(lambda))
        throw Error(ErrorCode::forbidden_parameter, "parameter " + std::to_string(double(lambda))
                                                        + " lies in the deleted interval [-1,0]");
}

/// Half-line problems admit positive parameters only.
template <typename Scalar>
void check_parameter_for(const BaseProblem<Scalar>& bp, Scalar lambda)
{
    check_parameter(lambda);
    if (bp.line() == LineKind::half_line && !(lambda > Scalar(0)))
        throw Error(ErrorCode::forbidden_parameter, "half-line problems require positive parameters");
}

/// Ordered deformation parameters lambda_1 .. lambda_i.
template <typename Scalar>
class ParamChain {
public:
    explicit ParamChain(std::vector<Scalar> lambdas) : lambdas_(std::move(lambdas))
    {
        if (lambdas_.empty())
            throw Error(ErrorCode::empty_list, "a parameter chain needs at least one parameter");
        for (std::size_t j = 0; j < lambdas_.size(); ++j) {
            try {
                check_parameter(lambdas_[j]);
            } catch (const Error& e) {
                throw Error(e.code(), e.what(), j + 1);
            }
        }
    }
    ParamChain(std::initializer_list<Scalar> lambdas) : ParamChain(std::vector<Scalar>(lambdas)) {}

    void check_for(const BaseProblem<Scalar>& bp) const
    {
        if (bp.line() != LineKind::half_line)
            return;
        for (std::size_t j = 0; j < lambdas_.size(); ++j)
            if (!(lambdas_[j] > Scalar(0)))
                throw Error(ErrorCode::forbidden_parameter, "half-line problems require positive parameters",
                            j + 1);
    }

    const std::vector<Scalar>& lambdas() const { return lambdas_; }
    std::size_t depth() const { return lambdas_.size(); }
    Scalar operator[](std::size_t j) const { return lambdas_[j]; }

private:
    std::vector<Scalar> lambdas_;
};

template <typename Scalar>
struct ChainResult {
    std::vector<SampledFunction<Scalar>> modes;       // v at depth 1 .. i
    std::vector<SampledFunction<Scalar>> potentials;  // V at depth 1 .. i
    std::vector<SampledFunction<Scalar>> integrals;   // int v_prev^2 entering step 1 .. i

    std::size_t depth() const { return modes.size(); }
    const SampledFunction<Scalar>& final_mode() const { return modes.back(); }
    const SampledFunction<Scalar>& final_potential() const { return potentials.back(); }
};

namespace detail {

// 1 / (lambda + I), evaluated as (1/lambda) / (1 + I/lambda) for |lambda| > 1.
template <typename Scalar>
ArrayX<Scalar> reciprocal_denominator(Scalar lambda, const ArrayX<Scalar>& integral)
{
    using std::abs;
    ArrayX<Scalar> den;
    ArrayX<Scalar> out;
    if (abs(lambda) > Scalar(1)) {
        den = Scalar(1) + integral / lambda;
        if (!(den > Scalar(0)).all())
            throw Error(ErrorCode::denominator_vanishes, "lambda + int v^2 changes sign");
        out = (Scalar(1) / lambda) / den;
    } else {
        den = lambda + integral;
        const bool positive = (den > Scalar(0)).all();
        const bool negative = (den < Scalar(0)).all();
        if (!positive && !negative)
            throw Error(ErrorCode::denominator_vanishes, "lambda + int v^2 changes sign");
        out = Scalar(1) / den;
    }
    return out;
}

// sqrt(lambda (lambda + 1)), scaled as |lambda| sqrt(1 + 1/lambda) for |lambda| > 1.
template <typename Scalar>
Scalar normalization_constant(Scalar lambda)
{
    using std::abs;
    using std::sqrt;
    if (abs(lambda) > Scalar(1))
        return abs(lambda) * sqrt(Scalar(1) + Scalar(1) / lambda);
    return sqrt(lambda * (lambda + Scalar(1)));
}

// ln((lambda + I) / lambda): the log of a step denominator with the constant
// ln|lambda| dropped, which D^2 annihilates anyway.
template <typename Scalar>
ArrayX<Scalar> log_denominator(Scalar lambda, const ArrayX<Scalar>& integral)
{
    using std::log1p;
    return (integral / lambda).unaryExpr([](Scalar t) { return log1p(t); });
}

template <typename Scalar>
void check_normalized(const SampledFunction<Scalar>& v)
{
    using std::abs;
    const Scalar norm2 = total_integral(square(v));
    if (abs(norm2 - Scalar(1)) > Scalar(normalization_tolerance))
        throw Error(ErrorCode::unnormalized_input,
                    "input mode has int v^2 = " + std::to_string(double(norm2)));
}

} // namespace detail

/// v_lambda = sqrt(lambda(lambda+1)) u0 / |lambda + Delta F|; the unnormalized
/// variant drops the sqrt factor. Modes are oriented with the sign of u0.
template <typename Scalar>
SampledFunction<Scalar> one_param_mode(const BaseProblem<Scalar>& bp, Scalar lambda, bool normalized = true)
{
    check_parameter_for(bp, lambda);
    const auto inv = detail::reciprocal_denominator(lambda, bp.delta_f().values());
    const Scalar scale = normalized ? detail::normalization_constant(lambda) : Scalar(1);
    return SampledFunction<Scalar>(bp.grid(), scale * bp.ground_state().values() * inv.abs());
}

/// V_lambda = V0 - 2 kappa D^2 ln(lambda + Delta F).
template <typename Scalar>
SampledFunction<Scalar> one_param_potential(const BaseProblem<Scalar>& bp, Scalar lambda,
                                            PotentialRoute route = PotentialRoute::log_form)
{
    check_parameter_for(bp, lambda);
    const Scalar kappa = bp.kinetic_scale();
    const auto& dF = bp.delta_f().values();
    if (route == PotentialRoute::log_form) {
        const SampledFunction<Scalar> logs(bp.grid(), detail::log_denominator(lambda, dF));
        return bp.potential() - (Scalar(2) * kappa) * second_derivative(logs);
    }
    const auto inv = detail::reciprocal_denominator(lambda, dF);
    const auto& u0 = bp.ground_state().values();
    const auto du0 = derivative(bp.ground_state());
    const ArrayX<Scalar> u0sq = u0 * u0;
    ArrayX<Scalar> v = bp.potential().values() - Scalar(4) * kappa * u0 * du0.values() * inv
                     + Scalar(2) * kappa * u0sq * u0sq * inv * inv;
    return SampledFunction<Scalar>(bp.grid(), std::move(v));
}

/// One normalized step: sqrt(lambda(lambda+1)) v_prev / |lambda + int v_prev^2|.
template <typename Scalar>
SampledFunction<Scalar> iterate_mode(const SampledFunction<Scalar>& v_prev, Scalar lambda)
{
    check_parameter(lambda);
    detail::check_normalized(v_prev);
    const auto integral = cumulative_integral(square(v_prev));
    const auto inv = detail::reciprocal_denominator(lambda, integral.values());
    return SampledFunction<Scalar>(v_prev.grid(),
                                   detail::normalization_constant(lambda) * v_prev.values() * inv.abs());
}

/// Folds iterate_mode over the chain, keeping every intermediate mode,
/// potential and running integral. Step failures carry their depth.
template <typename Scalar>
ChainResult<Scalar> chain_modes(const BaseProblem<Scalar>& bp, const ParamChain<Scalar>& chain)
{
    chain.check_for(bp);
    ChainResult<Scalar> out;
    const Scalar two_kappa = Scalar(2) * bp.kinetic_scale();
    SampledFunction<Scalar> prev = bp.ground_state();
    SampledFunction<Scalar> log_sum(bp.grid());
    for (std::size_t j = 0; j < chain.depth(); ++j) {
        const Scalar lambda = chain[j];
        try {
            auto integral = j == 0 ? bp.delta_f() : cumulative_integral(square(prev));
            const auto inv = detail::reciprocal_denominator(lambda, integral.values());
            SampledFunction<Scalar> mode(bp.grid(), detail::normalization_constant(lambda) * prev.values() * inv.abs());
            log_sum = log_sum + SampledFunction<Scalar>(bp.grid(), detail::log_denominator(lambda, integral.values()));
            out.potentials.push_back(bp.potential() - two_kappa * second_derivative(log_sum));
            out.integrals.push_back(std::move(integral));
            out.modes.push_back(mode);
            prev = std::move(mode);
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), j + 1);
        }
    }
    return out;
}

/// V0 - 2 kappa D^2 sum_j ln(lambda_j + int v_{j-1}^2), logs taken termwise.
template <typename Scalar>
SampledFunction<Scalar> chain_potential(const BaseProblem<Scalar>& bp, const ParamChain<Scalar>& chain)
{
    return chain_modes(bp, chain).final_potential();
}

/// General solution of the fermionic Riccati equation,
/// y1 = y0 + F0 / (lambda + Delta F), on the superpotential's mask.
template <typename Scalar>
MaskedFunction<Scalar> riccati_general_solution(const BaseProblem<Scalar>& bp, Scalar lambda)
{
    check_parameter_for(bp, lambda);
    auto y0 = superpotential(bp);
    const auto inv = detail::reciprocal_denominator(lambda, bp.delta_f().values());
    ArrayX<Scalar> y = y0.function.values() + integration_factor(bp).values() * inv;
    for (Index k = 0; k < y.size(); ++k)
        if (!y0.valid[k])
            y[k] = Scalar(0);
    return {SampledFunction<Scalar>(bp.grid(), std::move(y)), std::move(y0.valid)};
}

/// kappa (y^2 - y'): the bosonic potential whose zero mode is exp(-int y).
template <typename Scalar>
MaskedFunction<Scalar> bosonic_potential(const MaskedFunction<Scalar>& y, Scalar kappa)
{
    Mask valid = stencil_interior(y.valid);
    const auto dy = derivative(y.function);
    ArrayX<Scalar> v = kappa * (y.function.values().square() - dy.values());
    for (Index k = 0; k < v.size(); ++k)
        if (!valid[k])
            v[k] = Scalar(0);
    return {SampledFunction<Scalar>(y.function.grid(), std::move(v)), std::move(valid)};
}

/// kappa (y^2 + y'): the fermionic partner.
template <typename Scalar>
MaskedFunction<Scalar> fermionic_potential(const MaskedFunction<Scalar>& y, Scalar kappa)
{
    Mask valid = stencil_interior(y.valid);
    const auto dy = derivative(y.function);
    ArrayX<Scalar> v = kappa * (y.function.values().square() + dy.values());
    for (Index k = 0; k < v.size(); ++k)
        if (!valid[k])
            v[k] = Scalar(0);
    return {SampledFunction<Scalar>(y.function.grid(), std::move(v)), std::move(valid)};
}

/// V1 = kappa (y0^2 + y0'), shared by every member of the one-parameter family.
template <typename Scalar>
MaskedFunction<Scalar> partner_potential(const BaseProblem<Scalar>& bp)
{
    return fermionic_potential(superpotential(bp), bp.kinetic_scale());
}

} // namespace isospec
