#pragma once

// Base problems at zero factorization energy: a potential V0 whose nodeless
// ground state u0 sits at energy 0, together with the kinetic scale kappa of
// H = -kappa d^2/dx^2 + V0.
//
// Sign convention: y0 = -u0'/u0, so V0 = kappa (y0^2 - y0') and the
// fermionic partner is V1 = kappa (y0^2 + y0').

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "isospec/grid.hpp"
#include "isospec/spectral.hpp"

namespace isospec {

enum class LineKind { full_line, half_line };

template <typename Scalar>
class BaseProblem {
public:
    /// Validates the zero-mode invariants: u0 normalized on the grid, positive
    /// at every interior sample, and annihilated by -kappa D^2 + V0.
    BaseProblem(std::string name, SampledFunction<Scalar> potential, SampledFunction<Scalar> ground_state,
                Scalar kappa, Scalar energy_shift, LineKind line = LineKind::full_line)
        : name_(std::move(name)), potential_(std::move(potential)), ground_state_(std::move(ground_state)),
          kappa_(kappa), energy_shift_(energy_shift), line_(line),
          delta_f_(cumulative_integral(square(ground_state_)))
    {
        using std::abs;
        check_same_grid(potential_, ground_state_);
        if (!(kappa_ > Scalar(0)))
            throw Error(ErrorCode::invalid_base_problem, "kinetic scale must be positive");
        if (abs(delta_f_.back() - Scalar(1)) > Scalar(1e-8))
            throw Error(ErrorCode::invalid_base_problem, "ground state is not normalized on the grid");
        const Index n = ground_state_.size();
        if (!(ground_state_.values().segment(1, n - 2) > Scalar(0)).all())
            throw Error(ErrorCode::invalid_base_problem, "ground state must be positive at interior samples");
        const Scalar residual = zero_mode_residual(potential_, ground_state_, kappa_);
        if (residual > Scalar(1e-4))
            throw Error(ErrorCode::invalid_base_problem,
                        "ground state is not a zero mode (residual " + std::to_string(double(residual)) + ")");
    }

    const std::string& name() const { return name_; }
    const Grid<Scalar>& grid() const { return potential_.grid(); }
    const SampledFunction<Scalar>& potential() const { return potential_; }
    const SampledFunction<Scalar>& ground_state() const { return ground_state_; }
    Scalar kinetic_scale() const { return kappa_; }
    Scalar energy_shift() const { return energy_shift_; }
    LineKind line() const { return line_; }

    /// Running integral of u0^2 from the left endpoint: the kink function
    /// entering every denominator. Ranges over [0, 1].
    const SampledFunction<Scalar>& delta_f() const { return delta_f_; }

private:
    std::string name_;
    SampledFunction<Scalar> potential_;
    SampledFunction<Scalar> ground_state_;
    Scalar kappa_;
    Scalar energy_shift_;
    LineKind line_;
    SampledFunction<Scalar> delta_f_;
};

namespace detail {

template <typename Scalar>
void require_span(const Grid<Scalar>& grid, Scalar half_width, const char* what)
{
    if (grid.x_min() > -half_width || grid.x_max() < half_width)
        throw Error(ErrorCode::domain_too_small, std::string(what) + " needs a grid spanning at least ["
                                                     + std::to_string(double(-half_width)) + ", "
                                                     + std::to_string(double(half_width)) + "]");
}

} // namespace detail

/// Oscillator with hbar = m = omega = 1: kappa = 1/2, V0 = x^2/2 - 1/2,
/// u0 = pi^{-1/4} exp(-x^2/2) renormalized on the grid.
template <typename Scalar>
BaseProblem<Scalar> harmonic_oscillator(const Grid<Scalar>& grid)
{
    using std::exp;
    detail::require_span(grid, Scalar(8), "harmonic_oscillator");
    auto v0 = SampledFunction<Scalar>::sample(grid, [](Scalar x) { return x * x / Scalar(2) - Scalar(0.5); });
    auto u0 = normalize(SampledFunction<Scalar>::sample(grid, [](Scalar x) { return exp(-x * x / Scalar(2)); }));
    return BaseProblem<Scalar>("harmonic_oscillator", std::move(v0), std::move(u0), Scalar(0.5), Scalar(0.5));
}

/// Soliton well with kappa = 1: V0 = 1 - 2 sech^2 x, u0 = sech(x)/sqrt(2)
/// renormalized on the grid.
template <typename Scalar>
BaseProblem<Scalar> reflectionless_well(const Grid<Scalar>& grid)
{
    using std::cosh;
    detail::require_span(grid, Scalar(12), "reflectionless_well");
    auto v0 = SampledFunction<Scalar>::sample(grid, [](Scalar x) {
        const Scalar s = Scalar(1) / cosh(x);
        return Scalar(1) - Scalar(2) * s * s;
    });
    auto u0 = normalize(SampledFunction<Scalar>::sample(grid, [](Scalar x) { return Scalar(1) / cosh(x); }));
    return BaseProblem<Scalar>("reflectionless", std::move(v0), std::move(u0), Scalar(1), Scalar(1));
}

namespace detail {

// Rayleigh quotient iteration on the five-point Hamiltonian, started from the
// three-point ground state. Dirichlet ends enter through odd ghost values.
template <typename Scalar>
std::pair<Scalar, ArrayX<Scalar>> refine_ground_state(const SampledFunction<Scalar>& potential, Scalar kappa,
                                                      Scalar start_energy, const ArrayX<Scalar>& start)
{
    using Sparse = Eigen::SparseMatrix<Scalar>;
    const Index m = start.size() - 2;
    if (m < 5)
        return {start_energy, start};
    const Scalar h = potential.grid().spacing();
    const Scalar c = kappa / (Scalar(12) * h * h);
    std::vector<Eigen::Triplet<Scalar>> entries;
    entries.reserve(static_cast<std::size_t>(5 * m));
    for (Index j = 0; j < m; ++j) {
        const bool edge = j == 0 || j == m - 1;
        entries.emplace_back(j, j, (edge ? Scalar(29) : Scalar(30)) * c + potential[j + 1]);
        for (Index d : {Index(1), Index(2)}) {
            const Scalar w = d == 1 ? Scalar(-16) * c : c;
            if (j + d < m)
                entries.emplace_back(j, j + d, w);
            if (j - d >= 0)
                entries.emplace_back(j, j - d, w);
        }
    }
    Sparse H(m, m);
    H.setFromTriplets(entries.begin(), entries.end());
    Sparse I(m, m);
    I.setIdentity();

    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x = start.segment(1, m).matrix();
    x.normalize();
    Scalar energy = x.dot(H * x);
    Eigen::SparseLU<Sparse> lu;
    for (int it = 0; it < 3; ++it) {
        lu.compute(H - energy * I);
        if (lu.info() != Eigen::Success)
            break;
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y = lu.solve(x);
        if (lu.info() != Eigen::Success || !y.allFinite())
            break;
        x = y.normalized();
        energy = x.dot(H * x);
    }
    if (x.sum() < Scalar(0))
        x = -x;
    ArrayX<Scalar> full = ArrayX<Scalar>::Zero(m + 2);
    full.segment(1, m) = x.array();
    return {energy, std::move(full)};
}

} // namespace detail

/// Lowest eigenpair of the finite-difference Hamiltonian of V, refined on the
/// five-point stencil; the result is shifted so that the ground level sits at zero.
template <typename Scalar>
BaseProblem<Scalar> numeric_ground_state(const SampledFunction<Scalar>& potential, Scalar kappa,
                                         LineKind line = LineKind::full_line)
{
    using std::abs;
    if (!(kappa > Scalar(0)))
        throw Error(ErrorCode::invalid_base_problem, "kinetic scale must be positive");
    const auto pair = lowest_eigenpair(discretize(potential, kappa));
    if (!(pair.gap > Scalar(1e-8)))
        throw Error(ErrorCode::no_gap, "lowest level is degenerate or nearly so (gap "
                                           + std::to_string(double(pair.gap)) + ")");
    auto [energy, u] = detail::refine_ground_state(potential, kappa, pair.energy, pair.vector);
    const Index n = u.size();
    const Scalar peak = u.maxCoeff();
    for (Index k = 1; k < n - 1; ++k) {
        if (u[k] < -Scalar(1e-8) * peak)
            throw Error(ErrorCode::nodal_ground_state, "ground state changes sign at x = "
                                                           + std::to_string(double(potential.grid().x(k))));
        // roundoff-level values deep in the tails
        u[k] = std::max(abs(u[k]), std::numeric_limits<Scalar>::min());
    }
    auto u0 = normalize(SampledFunction<Scalar>(potential.grid(), std::move(u)));
    auto v0 = SampledFunction<Scalar>(potential.grid(), potential.values() - energy);
    return BaseProblem<Scalar>("numeric", std::move(v0), std::move(u0), kappa, energy, line);
}

/// y0 = -u0'/u0, masked where u0 <= 1e-12. Masked samples hold 0.
template <typename Scalar>
MaskedFunction<Scalar> superpotential(const BaseProblem<Scalar>& bp)
{
    const auto& u0 = bp.ground_state();
    const auto du = derivative(u0);
    ArrayX<Scalar> y = ArrayX<Scalar>::Zero(u0.size());
    Mask valid = u0.values() > Scalar(1e-12);
    for (Index k = 0; k < u0.size(); ++k)
        if (valid[k])
            y[k] = -du[k] / u0[k];
    return {SampledFunction<Scalar>(bp.grid(), std::move(y)), std::move(valid)};
}

/// F0 = u0^2, the normalized form of exp(-int_c^x 2 y0).
template <typename Scalar>
SampledFunction<Scalar> integration_factor(const BaseProblem<Scalar>& bp)
{
    return square(bp.ground_state());
}

} // namespace isospec
