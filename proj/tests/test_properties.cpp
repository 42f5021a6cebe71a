// Randomized invariants. Every generator is seeded explicitly so failures
// reproduce; the seed and trial index are printed on failure.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "isospec/isospec.hpp"
#include "oracles.hpp"

using namespace isospec;

namespace {

constexpr std::uint64_t seed = 0x5eed2024;

const Grid<double> ho_grid = make_grid(-10.0, 10.0, 4001);

const BaseProblem<double>& ho()
{
    static const auto bp = harmonic_oscillator(ho_grid);
    return bp;
}

const BaseProblem<double>& well()
{
    static const auto bp = reflectionless_well(make_grid(-12.0, 12.0, 4801));
    return bp;
}

// Random sum of Gaussian bumps on a random grid.
struct Bumps {
    std::vector<double> amp, centre, width;

    double operator()(double x) const
    {
        double s = 0;
        for (std::size_t i = 0; i < amp.size(); ++i)
            s += amp[i] * std::exp(-(x - centre[i]) * (x - centre[i]) / (width[i] * width[i]));
        return s;
    }
};

Bumps random_bumps(std::mt19937_64& rng, bool nonnegative)
{
    std::uniform_int_distribution<int> count(1, 4);
    std::uniform_real_distribution<double> a(nonnegative ? 0.0 : -2.0, 2.0), c(-3.0, 3.0), w(0.4, 2.0);
    Bumps b;
    for (int i = count(rng); i > 0; --i) {
        b.amp.push_back(a(rng));
        b.centre.push_back(c(rng));
        b.width.push_back(w(rng));
    }
    return b;
}

Grid<double> random_grid(std::mt19937_64& rng)
{
    std::uniform_int_distribution<long> n(401, 2001);
    return make_grid(-6.0, 6.0, n(rng));
}

Mask trim(Index n, Index margin)
{
    Mask m = Mask::Constant(n, true);
    m.head(margin).setConstant(false);
    m.tail(margin).setConstant(false);
    return m;
}

// Moderate parameters for the FD-limited residual checks.
std::vector<double> moderate_set(std::mt19937_64& rng, int depth)
{
    std::uniform_real_distribution<double> pos(0.05, 10.0), neg(-10.0, -1.05), side(0.0, 1.0);
    std::vector<double> l(static_cast<std::size_t>(depth));
    for (auto& v : l)
        v = side(rng) < 0.5 ? pos(rng) : neg(rng);
    return l;
}

} // namespace

TEST(GridProperties, CumulativeIntegralMonotoneForNonnegative)
{
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution spike(0.02);
    for (int trial = 0; trial < 50; ++trial) {
        const auto g = random_grid(rng);
        const auto b = random_bumps(rng, true);
        ArrayX<double> v(g.size());
        for (Index k = 0; k < g.size(); ++k)
            v[k] = b(g.x(k)) + (spike(rng) ? 3.0 : 0.0);
        const auto c = cumulative_integral(SampledFunction<double>(g, v));
        for (Index k = 1; k < g.size(); ++k)
            ASSERT_GE(c[k], c[k - 1]) << "trial " << trial << " k " << k;
    }
}

TEST(GridProperties, DerivativeInvertsCumulativeIntegral)
{
    std::mt19937_64 rng(seed + 1);
    for (int trial = 0; trial < 50; ++trial) {
        const auto g = random_grid(rng);
        const auto f = SampledFunction<double>::sample(g, random_bumps(rng, false));
        const auto back = derivative(cumulative_integral(f));
        const double h = g.spacing();
        ASSERT_LT(sup_distance(back, f, trim(g.size(), 1)), 50 * h * h) << "trial " << trial;
    }
}

TEST(GridProperties, NormalizeIsIdempotent)
{
    std::mt19937_64 rng(seed + 2);
    for (int trial = 0; trial < 50; ++trial) {
        const auto g = random_grid(rng);
        const auto once = normalize(SampledFunction<double>::sample(g, random_bumps(rng, false)));
        const auto twice = normalize(once);
        ASSERT_LT(sup_distance(once, twice), 1e-12 * std::max(1.0, once.values().abs().maxCoeff()));
        ASSERT_NEAR(total_integral(square(once)), 1.0, 1e-12);
    }
}

namespace {

std::vector<BaseProblem<double>> sample_problems()
{
    std::vector<BaseProblem<double>> out{ho(), well()};
    std::mt19937_64 rng(seed + 3);
    std::uniform_real_distribution<double> quartic(0.0, 0.1), tilt(-1.0, 1.0);
    for (int i = 0; i < 3; ++i) {
        const double a = quartic(rng), b = tilt(rng);
        const auto v = SampledFunction<double>::sample(ho_grid, [=](double x) { return x * x / 2 + a * x * x * x * x + b * x; });
        out.push_back(numeric_ground_state(v, 0.5));
    }
    return out;
}

} // namespace

TEST(BaseProperties, FactorizationAtZeroEnergy)
{
    for (const auto& bp : sample_problems()) {
        const auto y0 = superpotential(bp);
        const auto vb = bosonic_potential(y0, bp.kinetic_scale());
        const Mask mask = vb.valid && (bp.ground_state().values() > 1e-6);
        EXPECT_LT(sup_distance(vb.function, bp.potential(), mask), 1e-3) << bp.name();
    }
}

TEST(BaseProperties, IntegrationFactorFromSuperpotential)
{
    for (const auto& bp : sample_problems()) {
        const auto& u0 = bp.ground_state();
        const auto y0 = superpotential(bp);
        Index lo = 0, hi = u0.size() - 1;
        while (u0[lo] <= 1e-6)
            ++lo;
        while (u0[hi] <= 1e-6)
            --hi;
        const Index m = hi - lo + 1;
        const auto g = make_grid(bp.grid().x(lo), bp.grid().x(hi), m);
        const SampledFunction<double> two_y(g, 2.0 * y0.function.values().segment(lo, m));
        const auto i = cumulative_integral(two_y);
        double worst = 0;
        for (Index k = 0; k < m; ++k) {
            const double predicted = u0[lo] * u0[lo] * std::exp(-i[k]);
            const double actual = u0[lo + k] * u0[lo + k];
            worst = std::max(worst, std::abs(predicted / actual - 1.0));
        }
        EXPECT_LT(worst, 1e-5) << bp.name();
    }
}

TEST(ChainProperties, NormalizedAtEveryDepth)
{
    std::mt19937_64 rng(seed + 4);
    std::uniform_int_distribution<int> depth(1, 5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto& bp = trial % 2 ? well() : ho();
        const auto l = oracle::admissible_set(rng, depth(rng));
        const auto r = chain_modes(bp, ParamChain<double>(l));
        for (std::size_t j = 0; j < r.depth(); ++j) {
            ASSERT_NEAR(total_integral(square(r.modes[j])), 1.0, 1e-6) << "trial " << trial << " depth " << j + 1;
            const ArrayX<double> den = l[j] + r.integrals[j].values();
            ASSERT_TRUE((den > 0).all() || (den < 0).all()) << "trial " << trial << " depth " << j + 1;
        }
    }
}

TEST(ChainProperties, ZeroModeAtEveryDepth)
{
    std::mt19937_64 rng(seed + 5);
    std::uniform_int_distribution<int> depth(1, 4);
    for (int trial = 0; trial < 12; ++trial) {
        const auto& bp = trial % 2 ? well() : ho();
        const auto l = moderate_set(rng, depth(rng));
        const auto r = chain_modes(bp, ParamChain<double>(l));
        for (std::size_t j = 0; j < r.depth(); ++j)
            ASSERT_LE(zero_mode_residual(r.potentials[j], r.modes[j], bp.kinetic_scale()), 1e-3)
                << "trial " << trial << " depth " << j + 1;
    }
}

TEST(ChainProperties, PermutationInvariance)
{
    std::mt19937_64 rng(seed + 6);
    std::uniform_int_distribution<int> depth(2, 4);
    for (int trial = 0; trial < 12; ++trial) {
        auto l = oracle::admissible_set(rng, depth(rng));
        const auto a = chain_modes(ho(), ParamChain<double>(l));
        std::shuffle(l.begin(), l.end(), rng);
        const auto b = chain_modes(ho(), ParamChain<double>(l));
        ASSERT_LT(sup_distance(a.final_mode(), b.final_mode()), 1e-8) << "trial " << trial;
        ASSERT_LT(sup_distance(a.final_potential(), b.final_potential(), trim(ho_grid.size(), 2)), 1e-4)
            << "trial " << trial;
    }
}

TEST(ChainProperties, InfiniteParameterDropsOut)
{
    std::mt19937_64 rng(seed + 7);
    std::uniform_int_distribution<int> depth(1, 3);
    for (int trial = 0; trial < 12; ++trial) {
        const auto l = oracle::admissible_set(rng, depth(rng));
        auto with = l;
        std::uniform_int_distribution<std::size_t> pos(0, l.size());
        with.insert(with.begin() + static_cast<std::ptrdiff_t>(pos(rng)), trial % 2 ? 1e8 : -1e8);
        const auto a = chain_modes(ho(), ParamChain<double>(l));
        const auto b = chain_modes(ho(), ParamChain<double>(with));
        ASSERT_LT(sup_distance(a.final_mode(), b.final_mode()), 1e-6) << "trial " << trial;
        ASSERT_LT(sup_distance(a.final_potential(), b.final_potential()), 1e-6) << "trial " << trial;
    }
}

TEST(ClosedProperties, LambdaProductIdentity)
{
    std::mt19937_64 rng(seed + 8);
    std::uniform_int_distribution<int> depth(1, 6);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto c = viete_coefficients(oracle::admissible_set(rng, depth(rng)));
        const double ref = c.c1 * (c.c1 + c.c2);
        ASSERT_LE(std::abs(c.lambda_product - ref) / std::abs(ref), 1e-12) << "trial " << trial;
    }
}

TEST(ClosedProperties, EffectiveParameterReduction)
{
    std::mt19937_64 rng(seed + 9);
    std::uniform_int_distribution<int> depth(1, 4);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const auto l = oracle::admissible_set(rng, depth(rng));
        const auto c = viete_coefficients(l);
        if (!(c.c2 > 0))
            continue;
        ++checked;
        const double le = *c.lambda_eff;
        ASSERT_LT(sup_distance(closed_mode(ho(), c), one_param_mode(ho(), le)), 1e-10) << "trial " << trial;
        ASSERT_LT(sup_distance(closed_potential(ho(), c), one_param_potential(ho(), le, PotentialRoute::expanded)), 1e-12)
            << "trial " << trial;
    }
    EXPECT_GT(checked, 10);
}

TEST(ClosedProperties, InterchangeOfCoefficients)
{
    std::mt19937_64 rng(seed + 10);
    std::uniform_int_distribution<int> depth(2, 6);
    for (int trial = 0; trial < 200; ++trial) {
        auto l = oracle::admissible_set(rng, depth(rng));
        const auto a = viete_coefficients(l);
        std::shuffle(l.begin(), l.end(), rng);
        const auto b = viete_coefficients(l);
        if (l.size() == 2) {
            ASSERT_EQ(a.c1, b.c1);
            ASSERT_EQ(a.c2, b.c2);
        }
        ASSERT_LE(std::abs(a.c1 - b.c1), 1e-14 * std::abs(a.c1)) << "trial " << trial;
        ASSERT_LE(std::abs(a.c2 - b.c2), 1e-14 * std::max(std::abs(a.c2), std::abs(a.c1)) * 10) << "trial " << trial;
    }
}

TEST(ClosedProperties, PolynomialRootsMatchCoefficients)
{
    std::mt19937_64 rng(seed + 11);
    std::uniform_int_distribution<int> depth(1, 4);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto roots = oracle::admissible_set(rng, depth(rng));
        // expand prod (x - r) into a_0 .. a_i
        std::vector<double> a{1.0};
        for (const double r : roots) {
            std::vector<double> next(a.size() + 1, 0.0);
            for (std::size_t k = 0; k < a.size(); ++k) {
                next[k] += a[k];
                next[k + 1] -= r * a[k];
            }
            a = next;
        }
        // recover the roots from the companion matrix
        const Index i = static_cast<Index>(roots.size());
        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(i, i);
        for (Index k = 0; k < i; ++k)
            comp(0, k) = -a[static_cast<std::size_t>(k + 1)];
        for (Index k = 1; k < i; ++k)
            comp(k, k - 1) = 1.0;
        Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
        std::vector<double> found;
        bool real = true;
        for (Index k = 0; k < i; ++k) {
            const auto z = es.eigenvalues()[k];
            real = real && std::abs(z.imag()) < 1e-6 * std::max(1.0, std::abs(z.real()));
            found.push_back(z.real());
        }
        if (!real || std::any_of(found.begin(), found.end(), [](double r) { return is_forbidden(r); }))
            continue;
        VieteCoefficients<double> p{};
        try {
            p = from_polynomial(a);
        } catch (const Error&) {
            continue;
        }
        const auto v = viete_coefficients(found);
        const double scale = std::max({1.0, std::abs(v.c1), std::abs(v.c2)});
        ASSERT_LE(std::abs(p.c1 - v.c1), 1e-10 * scale) << "trial " << trial;
        ASSERT_LE(std::abs(p.c2 - v.c2), 1e-10 * scale) << "trial " << trial;
        ++checked;
    }
    EXPECT_GT(checked, 100);
}

TEST(ClosedProperties, ClosedMatchesChain)
{
    std::mt19937_64 rng(seed + 12);
    for (int trial = 0; trial < 20; ++trial) {
        const auto l = oracle::admissible_set(rng, 1 + trial % 4);
        const auto r = chain_modes(ho(), ParamChain<double>(l));
        ASSERT_LT(sup_distance(r.final_mode(), closed_mode(ho(), l)), 1e-8) << "trial " << trial;
    }
}
