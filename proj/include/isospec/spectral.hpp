#pragma once

// Finite-difference Hamiltonians -kappa d^2/dx^2 + V with Dirichlet ends,
// Sturm-sequence bisection for their lowest levels, and zero-mode residuals.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "isospec/grid.hpp"

namespace isospec {

/// Symmetric tridiagonal matrix on the interior samples of a grid.
template <typename Scalar>
struct TridiagonalHamiltonian {
    ArrayX<Scalar> diagonal;     // 2 kappa / h^2 + V(x_k), k = 1 .. n-2
    ArrayX<Scalar> offdiagonal;  // -kappa / h^2
    Grid<Scalar> grid;
    Scalar kappa;

    Index size() const { return diagonal.size(); }
};

/// Three-point Laplacian with Dirichlet conditions at the grid endpoints.
template <typename Scalar>
TridiagonalHamiltonian<Scalar> discretize(const SampledFunction<Scalar>& potential, Scalar kappa)
{
    const auto& g = potential.grid();
    const Index m = g.size() - 2;
    const Scalar h2 = g.spacing() * g.spacing();
    ArrayX<Scalar> diag = Scalar(2) * kappa / h2 + potential.values().segment(1, m);
    ArrayX<Scalar> off = ArrayX<Scalar>::Constant(std::max<Index>(m - 1, 0), -kappa / h2);
    return {std::move(diag), std::move(off), g, kappa};
}

/// Number of eigenvalues strictly below sigma (Sylvester inertia of H - sigma).
template <typename Scalar>
Index sturm_count(const TridiagonalHamiltonian<Scalar>& H, Scalar sigma)
{
    const Index m = H.size();
    const Scalar tiny = std::numeric_limits<Scalar>::min() / std::numeric_limits<Scalar>::epsilon();
    Index count = 0;
    Scalar d = H.diagonal[0] - sigma;
    for (Index i = 0;;) {
        if (d == Scalar(0))
            d = -tiny;
        if (d < Scalar(0))
            ++count;
        if (++i == m)
            break;
        const Scalar b = H.offdiagonal[i - 1];
        d = (H.diagonal[i] - sigma) - b * b / d;
    }
    return count;
}

template <typename Scalar>
std::pair<Scalar, Scalar> gershgorin_bounds(const TridiagonalHamiltonian<Scalar>& H)
{
    using std::abs;
    const Index m = H.size();
    Scalar lo = std::numeric_limits<Scalar>::max();
    Scalar hi = std::numeric_limits<Scalar>::lowest();
    for (Index i = 0; i < m; ++i) {
        Scalar r(0);
        if (i > 0)
            r += abs(H.offdiagonal[i - 1]);
        if (i < m - 1)
            r += abs(H.offdiagonal[i]);
        lo = std::min(lo, H.diagonal[i] - r);
        hi = std::max(hi, H.diagonal[i] + r);
    }
    return {lo, hi};
}

/// The k smallest eigenvalues in ascending order, by bisection on the Sturm
/// count to the given absolute tolerance.
template <typename Scalar>
std::vector<Scalar> lowest_eigenvalues(const TridiagonalHamiltonian<Scalar>& H, Index k,
                                       Scalar tol = Scalar(1e-10))
{
    if (k < 1 || k > H.size())
        throw Error(ErrorCode::k_out_of_range, "requested " + std::to_string(k)
                                                   + " eigenvalues of a matrix of size "
                                                   + std::to_string(H.size()));
    auto [lo0, hi0] = gershgorin_bounds(H);
    std::vector<Scalar> levels;
    levels.reserve(static_cast<std::size_t>(k));
    Scalar floor = lo0;
    for (Index j = 0; j < k; ++j) {
        Scalar lo = floor;
        Scalar hi = hi0;
        // invariant: count(lo) <= j < count(hi)
        while (hi - lo > tol) {
            const Scalar mid = lo + (hi - lo) / Scalar(2);
            if (mid <= lo || mid >= hi)
                break;
            if (sturm_count(H, mid) > j)
                hi = mid;
            else
                lo = mid;
        }
        const Scalar level = lo + (hi - lo) / Scalar(2);
        levels.push_back(level);
        floor = lo;
    }
    return levels;
}

/// Lowest levels of potential, Richardson-extrapolated from the grid and its
/// every-other-point subgrid: (4 E_h - E_2h) / 3. Falls back to the plain
/// levels when the grid has no coarse companion.
template <typename Scalar>
std::vector<Scalar> extrapolated_levels(const SampledFunction<Scalar>& potential, Scalar kappa, Index k,
                                        Scalar tol = Scalar(1e-11))
{
    auto fine = lowest_eigenvalues(discretize(potential, kappa), k, tol);
    const auto& g = potential.grid();
    if (!g.has_coarse() || g.coarse().size() - 2 < k)
        return fine;
    const Index nc = g.coarse().size();
    ArrayX<Scalar> vc(nc);
    for (Index i = 0; i < nc; ++i)
        vc[i] = potential[2 * i];
    const auto coarse = lowest_eigenvalues(discretize(SampledFunction<Scalar>(g.coarse(), vc), kappa), k, tol);
    for (std::size_t j = 0; j < fine.size(); ++j)
        fine[j] = (Scalar(4) * fine[j] - coarse[j]) / Scalar(3);
    return fine;
}

namespace detail {

// Solves (T - sigma) x = rhs for symmetric tridiagonal T (Thomas algorithm).
template <typename Scalar>
ArrayX<Scalar> shifted_solve(const TridiagonalHamiltonian<Scalar>& H, Scalar sigma, const ArrayX<Scalar>& rhs)
{
    const Index m = H.size();
    ArrayX<Scalar> c(m), d(m), x(m);
    const Scalar tiny = std::numeric_limits<Scalar>::epsilon() * std::numeric_limits<Scalar>::epsilon();
    Scalar piv = H.diagonal[0] - sigma;
    if (piv == Scalar(0))
        piv = tiny;
    c[0] = m > 1 ? H.offdiagonal[0] / piv : Scalar(0);
    d[0] = rhs[0] / piv;
    for (Index i = 1; i < m; ++i) {
        const Scalar b = H.offdiagonal[i - 1];
        piv = (H.diagonal[i] - sigma) - b * c[i - 1];
        if (piv == Scalar(0))
            piv = tiny;
        c[i] = i < m - 1 ? H.offdiagonal[i] / piv : Scalar(0);
        d[i] = (rhs[i] - b * d[i - 1]) / piv;
    }
    x[m - 1] = d[m - 1];
    for (Index i = m - 2; i >= 0; --i)
        x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

} // namespace detail

/// Lowest eigenpair. The eigenvector is returned on the full grid (zero at
/// the Dirichlet ends), unit-normalized in the discrete 2-norm and with a
/// positive sum.
template <typename Scalar>
struct GroundPair {
    Scalar energy;
    Scalar gap;  // E_1 - E_0
    ArrayX<Scalar> vector;
};

template <typename Scalar>
GroundPair<Scalar> lowest_eigenpair(const TridiagonalHamiltonian<Scalar>& H)
{
    using std::abs;
    using std::max;
    if (H.size() < 2)
        throw Error(ErrorCode::k_out_of_range, "ground state needs at least two interior points");
    const auto levels = lowest_eigenvalues(H, 2, Scalar(1e-12));
    const Scalar e0 = levels[0];
    const Scalar gap = levels[1] - levels[0];
    const Scalar sigma = e0 - max(gap * Scalar(1e-6), Scalar(64) * std::numeric_limits<Scalar>::epsilon()
                                                           * max(Scalar(1), abs(e0)));
    ArrayX<Scalar> x = ArrayX<Scalar>::Ones(H.size());
    for (int it = 0; it < 4; ++it) {
        x = detail::shifted_solve(H, sigma, x);
        x /= x.matrix().norm();
    }
    if (x.sum() < Scalar(0))
        x = -x;
    ArrayX<Scalar> full = ArrayX<Scalar>::Zero(H.size() + 2);
    full.segment(1, H.size()) = x;
    return {e0, gap, std::move(full)};
}

/// Relative residual || -kappa v'' + V v ||_2 / || v ||_2 over samples with
/// |v| > threshold whose second-derivative stencil stays inside that set.
template <typename Scalar>
Scalar zero_mode_residual(const SampledFunction<Scalar>& potential, const SampledFunction<Scalar>& mode,
                          Scalar kappa, Scalar threshold = Scalar(1e-8))
{
    using std::sqrt;
    check_same_grid(potential, mode);
    const Mask above = mode.values().abs() > threshold;
    const Mask mask = stencil_interior(above);
    if (!mask.any())
        throw Error(ErrorCode::empty_mask, "no samples above the residual threshold");
    const auto vpp = second_derivative(mode);
    Scalar num(0), den(0);
    for (Index k = 0; k < mode.size(); ++k) {
        if (!mask[k])
            continue;
        const Scalar r = -kappa * vpp[k] + potential[k] * mode[k];
        num += r * r;
        den += mode[k] * mode[k];
    }
    return sqrt(num / den);
}

} // namespace isospec
