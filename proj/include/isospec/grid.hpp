#pragma once

// Uniform grids, sampled functions and the discrete calculus used by every
// other part of the library.
//
// Differentiation uses fourth-order stencils (five-point central in the
// interior, one-sided near the ends). Integration is the composite trapezoid
// rule with the Euler-Maclaurin end correction applied per interval, which is
// the same as integrating the local cubic interpolant. An interval whose
// corrected increment would be negative while both end samples are
// nonnegative falls back to the plain trapezoid increment, so running
// integrals of nonnegative data never decrease.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "isospec/error.hpp"

namespace isospec {

using Index = Eigen::Index;

template <typename Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

template <typename Scalar>
class Grid {
public:
    Grid(Scalar x_min, Scalar x_max, Index n) : x_min_(x_min), x_max_(x_max), n_(n)
    {
        using std::isfinite;
        if (n < 3)
            throw Error(ErrorCode::too_few_points,
                        "grid needs at least 3 points, got " + std::to_string(n));
        if (!isfinite(x_min) || !isfinite(x_max) || !(x_min < x_max))
            throw Error(ErrorCode::invalid_bounds, "grid requires finite x_min < x_max");
        h_ = (x_max_ - x_min_) / Scalar(n_ - 1);
    }

    Scalar x_min() const { return x_min_; }
    Scalar x_max() const { return x_max_; }
    Index size() const { return n_; }
    Scalar spacing() const { return h_; }

    /// Sample position; the last point is pinned to x_max exactly.
    Scalar x(Index k) const { return k == n_ - 1 ? x_max_ : x_min_ + Scalar(k) * h_; }

    ArrayX<Scalar> points() const
    {
        ArrayX<Scalar> p(n_);
        for (Index k = 0; k < n_; ++k)
            p[k] = x(k);
        return p;
    }

    bool contains(Scalar xv) const { return xv >= x_min_ && xv <= x_max_; }

    /// Index of the sample closest to xv (clamped to the grid).
    Index nearest_index(Scalar xv) const
    {
        using std::round;
        const Scalar t = round((xv - x_min_) / h_);
        if (t <= Scalar(0))
            return 0;
        if (t >= Scalar(n_ - 1))
            return n_ - 1;
        return static_cast<Index>(t);
    }

    /// Every-other-point subgrid; requires an odd sample count.
    bool has_coarse() const { return n_ % 2 == 1 && (n_ - 1) / 2 + 1 >= 3; }
    Grid coarse() const { return Grid(x_min_, x_max_, (n_ - 1) / 2 + 1); }

    friend bool operator==(const Grid& a, const Grid& b)
    {
        return a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_ && a.n_ == b.n_;
    }
    friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

private:
    Scalar x_min_;
    Scalar x_max_;
    Index n_;
    Scalar h_{};
};

template <typename Scalar>
Grid<Scalar> make_grid(Scalar x_min, Scalar x_max, Index n)
{
    return Grid<Scalar>(x_min, x_max, n);
}

/// Real function sampled on a grid. All samples are finite.
template <typename Scalar>
class SampledFunction {
public:
    using Values = ArrayX<Scalar>;

    SampledFunction(const Grid<Scalar>& grid, Values values) : grid_(grid), values_(std::move(values))
    {
        if (values_.size() != grid_.size())
            throw Error(ErrorCode::grid_mismatch, "sample count " + std::to_string(values_.size())
                                                      + " does not match grid size "
                                                      + std::to_string(grid_.size()));
        if (!values_.allFinite())
            throw Error(ErrorCode::non_finite, "sampled function contains non-finite values");
    }

    /// Zero function on the grid.
    explicit SampledFunction(const Grid<Scalar>& grid) : grid_(grid), values_(Values::Zero(grid.size())) {}

    template <typename F>
    static SampledFunction sample(const Grid<Scalar>& grid, F&& f)
    {
        Values v(grid.size());
        for (Index k = 0; k < grid.size(); ++k)
            v[k] = f(grid.x(k));
        return SampledFunction(grid, std::move(v));
    }

    const Grid<Scalar>& grid() const { return grid_; }
    const Values& values() const { return values_; }
    Index size() const { return values_.size(); }
    Scalar operator[](Index k) const { return values_[k]; }
    Scalar front() const { return values_[0]; }
    Scalar back() const { return values_[values_.size() - 1]; }

    /// Returns a new function with fn applied samplewise.
    template <typename F>
    SampledFunction map(F&& fn) const
    {
        return SampledFunction(grid_, values_.unaryExpr(std::forward<F>(fn)).eval());
    }

    friend SampledFunction operator+(const SampledFunction& a, const SampledFunction& b)
    {
        check_same_grid(a, b);
        return SampledFunction(a.grid_, a.values_ + b.values_);
    }
    friend SampledFunction operator-(const SampledFunction& a, const SampledFunction& b)
    {
        check_same_grid(a, b);
        return SampledFunction(a.grid_, a.values_ - b.values_);
    }
    friend SampledFunction operator*(const SampledFunction& a, const SampledFunction& b)
    {
        check_same_grid(a, b);
        return SampledFunction(a.grid_, a.values_ * b.values_);
    }
    friend SampledFunction operator*(Scalar s, const SampledFunction& a)
    {
        return SampledFunction(a.grid_, s * a.values_);
    }
    friend SampledFunction operator*(const SampledFunction& a, Scalar s) { return s * a; }
    friend SampledFunction operator-(const SampledFunction& a)
    {
        return SampledFunction(a.grid_, -a.values_);
    }

    friend void check_same_grid(const SampledFunction& a, const SampledFunction& b)
    {
        if (a.grid_ != b.grid_)
            throw Error(ErrorCode::grid_mismatch, "functions live on different grids");
    }

private:
    Grid<Scalar> grid_;
    Values values_;
};

/// A sampled function together with the samples at which it is trustworthy.
template <typename Scalar>
struct MaskedFunction {
    SampledFunction<Scalar> function;
    Mask valid;

    Index valid_count() const { return valid.count(); }
};

namespace detail {

template <typename Scalar>
ArrayX<Scalar> derivative_values(const ArrayX<Scalar>& f, Scalar h)
{
    const Index n = f.size();
    ArrayX<Scalar> d(n);
    if (n < 5) {
        const Scalar inv2h = Scalar(1) / (Scalar(2) * h);
        for (Index i = 1; i < n - 1; ++i)
            d[i] = (f[i + 1] - f[i - 1]) * inv2h;
        d[0] = (Scalar(-3) * f[0] + Scalar(4) * f[1] - f[2]) * inv2h;
        d[n - 1] = (Scalar(3) * f[n - 1] - Scalar(4) * f[n - 2] + f[n - 3]) * inv2h;
        return d;
    }
    const Scalar inv12h = Scalar(1) / (Scalar(12) * h);
    for (Index i = 2; i < n - 2; ++i)
        d[i] = (f[i - 2] - Scalar(8) * f[i - 1] + Scalar(8) * f[i + 1] - f[i + 2]) * inv12h;
    d[0] = (Scalar(-25) * f[0] + Scalar(48) * f[1] - Scalar(36) * f[2] + Scalar(16) * f[3]
            - Scalar(3) * f[4]) * inv12h;
    d[1] = (Scalar(-3) * f[0] - Scalar(10) * f[1] + Scalar(18) * f[2] - Scalar(6) * f[3] + f[4])
         * inv12h;
    d[n - 1] = (Scalar(25) * f[n - 1] - Scalar(48) * f[n - 2] + Scalar(36) * f[n - 3]
                - Scalar(16) * f[n - 4] + Scalar(3) * f[n - 5]) * inv12h;
    d[n - 2] = (Scalar(3) * f[n - 1] + Scalar(10) * f[n - 2] - Scalar(18) * f[n - 3]
                + Scalar(6) * f[n - 4] - f[n - 5]) * inv12h;
    return d;
}

template <typename Scalar>
ArrayX<Scalar> second_derivative_values(const ArrayX<Scalar>& f, Scalar h)
{
    const Index n = f.size();
    ArrayX<Scalar> d(n);
    const Scalar h2 = h * h;
    if (n < 6) {
        for (Index i = 1; i < n - 1; ++i)
            d[i] = (f[i + 1] - Scalar(2) * f[i] + f[i - 1]) / h2;
        if (n == 3) {
            d[0] = d[1];
            d[2] = d[1];
        } else {
            d[0] = Scalar(2) * d[1] - d[2];
            d[n - 1] = Scalar(2) * d[n - 2] - d[n - 3];
        }
        return d;
    }
    const Scalar inv12h2 = Scalar(1) / (Scalar(12) * h2);
    for (Index i = 2; i < n - 2; ++i)
        d[i] = (-f[i - 2] + Scalar(16) * f[i - 1] - Scalar(30) * f[i] + Scalar(16) * f[i + 1]
                - f[i + 2]) * inv12h2;
    auto left0 = [&](Index s, Index o) {
        return (Scalar(45) * f[o] - Scalar(154) * f[o + s] + Scalar(214) * f[o + 2 * s]
                - Scalar(156) * f[o + 3 * s] + Scalar(61) * f[o + 4 * s] - Scalar(10) * f[o + 5 * s])
             * inv12h2;
    };
    auto left1 = [&](Index s, Index o) {
        return (Scalar(10) * f[o] - Scalar(15) * f[o + s] - Scalar(4) * f[o + 2 * s]
                + Scalar(14) * f[o + 3 * s] - Scalar(6) * f[o + 4 * s] + f[o + 5 * s])
             * inv12h2;
    };
    d[0] = left0(1, 0);
    d[1] = left1(1, 0);
    d[n - 1] = left0(-1, n - 1);
    d[n - 2] = left1(-1, n - 1);
    return d;
}

// Increment of the running integral over [x_k, x_{k+1}] for k = 0 .. n-2.
template <typename Scalar>
ArrayX<Scalar> interval_increments(const ArrayX<Scalar>& f, Scalar h)
{
    const Index n = f.size();
    ArrayX<Scalar> inc(n - 1);
    const Scalar half_h = h / Scalar(2);
    for (Index k = 0; k < n - 1; ++k)
        inc[k] = half_h * (f[k] + f[k + 1]);
    if (n < 4)
        return inc;

    const Scalar h24 = h / Scalar(24);
    for (Index k = 0; k < n - 1; ++k) {
        Scalar cubic;
        if (k == 0)
            cubic = h24 * (Scalar(9) * f[0] + Scalar(19) * f[1] - Scalar(5) * f[2] + f[3]);
        else if (k == n - 2)
            cubic = h24 * (Scalar(9) * f[n - 1] + Scalar(19) * f[n - 2] - Scalar(5) * f[n - 3]
                           + f[n - 4]);
        else
            cubic = h24 * (-f[k - 1] + Scalar(13) * f[k] + Scalar(13) * f[k + 1] - f[k + 2]);
        // positivity fallback
        if (cubic < Scalar(0) && f[k] >= Scalar(0) && f[k + 1] >= Scalar(0))
            continue;
        inc[k] = cubic;
    }
    return inc;
}

} // namespace detail

/// First derivative, fourth order (second order when n < 5).
template <typename Scalar>
SampledFunction<Scalar> derivative(const SampledFunction<Scalar>& f)
{
    return SampledFunction<Scalar>(f.grid(), detail::derivative_values(f.values(), f.grid().spacing()));
}

/// Second derivative, fourth order (three-point with extrapolated ends when n < 6).
template <typename Scalar>
SampledFunction<Scalar> second_derivative(const SampledFunction<Scalar>& f)
{
    return SampledFunction<Scalar>(f.grid(),
                                   detail::second_derivative_values(f.values(), f.grid().spacing()));
}

/// Running integral from x_min; exactly zero at the left endpoint.
template <typename Scalar>
SampledFunction<Scalar> cumulative_integral(const SampledFunction<Scalar>& f)
{
    const auto inc = detail::interval_increments(f.values(), f.grid().spacing());
    ArrayX<Scalar> c(f.size());
    c[0] = Scalar(0);
    for (Index k = 1; k < f.size(); ++k)
        c[k] = c[k - 1] + inc[k - 1];
    return SampledFunction<Scalar>(f.grid(), std::move(c));
}

/// Running integral from x to x_max; exactly zero at the right endpoint.
/// Mirror image of cumulative_integral, so tails near x_max keep full
/// relative precision.
template <typename Scalar>
SampledFunction<Scalar> cumulative_integral_from_right(const SampledFunction<Scalar>& f)
{
    const auto inc = detail::interval_increments(f.values(), f.grid().spacing());
    const Index n = f.size();
    ArrayX<Scalar> c(n);
    c[n - 1] = Scalar(0);
    for (Index k = n - 2; k >= 0; --k)
        c[k] = c[k + 1] + inc[k];
    return SampledFunction<Scalar>(f.grid(), std::move(c));
}

template <typename Scalar>
Scalar total_integral(const SampledFunction<Scalar>& f)
{
    return cumulative_integral(f).back();
}

template <typename Scalar>
SampledFunction<Scalar> square(const SampledFunction<Scalar>& f)
{
    return f * f;
}

/// f / sqrt(total_integral(f^2)).
template <typename Scalar>
SampledFunction<Scalar> normalize(const SampledFunction<Scalar>& f)
{
    using std::sqrt;
    const Scalar norm2 = total_integral(square(f));
    if (!(norm2 > Scalar(0)))
        throw Error(ErrorCode::zero_norm, "cannot normalize a function with zero L2 norm");
    return f * (Scalar(1) / sqrt(norm2));
}

/// Samples whose full second-derivative stencil lies inside `valid`.
inline Mask stencil_interior(const Mask& valid)
{
    const Index n = valid.size();
    Mask out = Mask::Constant(n, false);
    if (n < 6) {
        out = valid;
        if (!valid.all())
            out.setConstant(false);
        return out;
    }
    auto all_in = [&](Index lo, Index hi) {
        for (Index j = lo; j <= hi; ++j)
            if (!valid[j])
                return false;
        return true;
    };
    for (Index i = 0; i < n; ++i) {
        if (i < 2)
            out[i] = all_in(0, 5);
        else if (i > n - 3)
            out[i] = all_in(n - 6, n - 1);
        else
            out[i] = all_in(i - 2, i + 2);
    }
    return out;
}

/// Largest |a - b| over the samples selected by mask (all samples if empty).
template <typename Scalar>
Scalar sup_distance(const SampledFunction<Scalar>& a, const SampledFunction<Scalar>& b,
                    const Mask& mask = Mask())
{
    check_same_grid(a, b);
    const ArrayX<Scalar> diff = (a.values() - b.values()).abs();
    if (mask.size() == 0)
        return diff.maxCoeff();
    Scalar m(0);
    for (Index k = 0; k < diff.size(); ++k)
        if (mask[k])
            m = std::max(m, diff[k]);
    return m;
}

} // namespace isospec
