#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "isospec/verify.hpp"
#include "oracles.hpp"

using namespace isospec;

namespace {

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no isospec::Error thrown";
    return ErrorCode::io_error;
}

const Grid<double> grid = make_grid(-10.0, 10.0, 4001);

const BaseProblem<double>& ho()
{
    static const auto bp = harmonic_oscillator(grid);
    return bp;
}

} // namespace

TEST(Discretize, Entries)
{
    const auto g = make_grid(0.0, 1.0, 11);
    const auto v = SampledFunction<double>::sample(g, [](double x) { return x * x; });
    const auto H = discretize(v, 0.5);
    ASSERT_EQ(H.size(), 9);
    ASSERT_EQ(H.offdiagonal.size(), 8);
    const double h2 = g.spacing() * g.spacing();
    for (Index i = 0; i < 9; ++i)
        EXPECT_EQ(H.diagonal[i], 1.0 / h2 + v[i + 1]);
    for (Index i = 0; i < 8; ++i)
        EXPECT_EQ(H.offdiagonal[i], -0.5 / h2);
}

TEST(Discretize, FreeBoxGroundLevel)
{
    const auto g = make_grid(0.0, 1.0, 1001);
    const auto levels = lowest_eigenvalues(discretize(SampledFunction<double>(g), 1.0), 3);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    EXPECT_NEAR(levels[0], pi2, 1e-3 * pi2);
    for (int m = 1; m <= 3; ++m) {
        EXPECT_NEAR(levels[m - 1], m * m * pi2, 1e-3 * m * m * pi2);
        EXPECT_NEAR(levels[m - 1], oracle::box_level(1.0, g.spacing(), g.size(), m), 1e-8);
    }
}

TEST(LowestEigenvalues, OscillatorLevels)
{
    const auto levels = lowest_eigenvalues(discretize(ho().potential(), 0.5), 6);
    for (int j = 0; j < 6; ++j)
        EXPECT_NEAR(levels[j], j, 1e-4);
}

TEST(LowestEigenvalues, ReflectionlessBoundState)
{
    const auto bp = reflectionless_well(make_grid(-12.0, 12.0, 4801));
    const auto levels = lowest_eigenvalues(discretize(bp.potential(), 1.0), 1);
    EXPECT_NEAR(levels[0], 0.0, 1e-4);
}

TEST(LowestEigenvalues, KOutOfRange)
{
    const auto H = discretize(SampledFunction<double>(make_grid(0.0, 1.0, 7)), 1.0);
    EXPECT_EQ(code_of([&] { lowest_eigenvalues(H, 0); }), ErrorCode::k_out_of_range);
    EXPECT_EQ(code_of([&] { lowest_eigenvalues(H, 6); }), ErrorCode::k_out_of_range);
    EXPECT_NO_THROW(lowest_eigenvalues(H, 5));
}

TEST(LowestEigenvalues, AgreesWithEigenTridiagonalSolver)
{
    std::mt19937_64 rng(20241019);
    std::uniform_int_distribution<int> size(3, 200);
    std::uniform_real_distribution<double> val(-50.0, 50.0);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = size(rng);
        const auto g = make_grid(-1.0, 1.0, n);
        const auto v = SampledFunction<double>::sample(g, [&](double) { return val(rng); });
        const auto H = discretize(v, 0.01 + 0.1 * (trial % 7));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(H.diagonal.matrix(), H.offdiagonal.matrix(), Eigen::EigenvaluesOnly);
        const Index k = std::min<Index>(H.size(), 8);
        const auto levels = lowest_eigenvalues(H, k);
        for (Index j = 0; j < k; ++j)
            ASSERT_NEAR(levels[j], es.eigenvalues()[j], 1e-9 * std::max(1.0, std::abs(levels[j])))
                << "trial " << trial << " j " << j;
    }
}

TEST(LowestEigenvalues, SecondOrderConvergence)
{
    std::vector<double> err;
    for (long n : {501, 1001, 2001}) {
        const auto g = make_grid(-10.0, 10.0, n);
        const auto bp = harmonic_oscillator(g);
        const auto levels = lowest_eigenvalues(discretize(bp.potential(), 0.5), 4, 1e-13);
        err.push_back(std::abs(levels[3] - 3.0));
    }
    EXPECT_NEAR(err[0] / err[1], 4.0, 0.1);
    EXPECT_NEAR(err[1] / err[2], 4.0, 0.1);
}

TEST(ExtrapolatedLevels, RemoveLeadingError)
{
    const auto raw = lowest_eigenvalues(discretize(ho().potential(), 0.5), 6);
    const auto ext = extrapolated_levels(ho().potential(), 0.5, 6);
    for (int j = 0; j < 6; ++j) {
        EXPECT_NEAR(ext[j], j, 5e-9);
        EXPECT_LT(std::abs(ext[j] - j), std::abs(raw[j] - j) + 1e-12);
    }
}

TEST(LowestEigenpair, OscillatorGroundState)
{
    const auto pair = lowest_eigenpair(discretize(ho().potential(), 0.5));
    EXPECT_NEAR(pair.energy, 0.0, 1e-4);
    EXPECT_NEAR(pair.gap, 1.0, 1e-4);
    EXPECT_EQ(pair.vector.size(), grid.size());
    EXPECT_EQ(pair.vector[0], 0.0);
    EXPECT_GT(pair.vector[2000], 0.0);
}

TEST(ZeroModeResidual, CatalogProblems)
{
    EXPECT_LE(zero_mode_residual(ho().potential(), ho().ground_state(), 0.5), 1e-4);
    const auto rl = reflectionless_well(make_grid(-12.0, 12.0, 4801));
    EXPECT_LE(zero_mode_residual(rl.potential(), rl.ground_state(), 1.0), 1e-4);
}

TEST(ZeroModeResidual, DeformedPair)
{
    const double r = zero_mode_residual(one_param_potential(ho(), 0.2), one_param_mode(ho(), 0.2), 0.5);
    EXPECT_LE(r, 1e-3);
}

TEST(ZeroModeResidual, WrongPotentialDetected)
{
    const double r = zero_mode_residual(ho().potential(), one_param_mode(ho(), 0.2), 0.5);
    EXPECT_GT(r, 1e-1);
}

TEST(ZeroModeResidual, EmptyMask)
{
    EXPECT_EQ(code_of([] { zero_mode_residual(ho().potential(), SampledFunction<double>(grid), 0.5); }),
              ErrorCode::empty_mask);
}

TEST(VerifyIsospectral, LargeParameter)
{
    const auto r = verify_isospectral(ho(), std::vector{1e8}, 6, 1e-8);
    EXPECT_TRUE(r.passed);
    EXPECT_LE(r.max_abs_diff, 1e-8);
    EXPECT_LE(r.raw_max_abs_diff, 1e-8);
}

TEST(VerifyIsospectral, DepthOneAndTwo)
{
    for (const auto& l : {std::vector{0.2}, std::vector{0.1, 0.2}}) {
        const auto r = verify_isospectral(ho(), l, 6, 1e-6);
        EXPECT_TRUE(r.passed);
        EXPECT_TRUE(r.extrapolated);
        EXPECT_LE(r.max_abs_diff, 1e-6);
        EXPECT_LE(r.zero_mode_residual, 1e-3);
        ASSERT_EQ(r.base_levels.size(), 6u);
        for (int j = 0; j < 6; ++j)
            EXPECT_NEAR(r.base_levels[j], j, 1e-4);
    }
}

TEST(VerifyIsospectral, PerturbationFails)
{
    VerifyOptions<double> opt;
    opt.perturbation = SampledFunction<double>::sample(grid, [](double x) { return 0.01 * std::exp(-x * x); });
    const auto r = verify_isospectral(ho(), std::vector{0.2}, 6, 1e-6, opt);
    EXPECT_FALSE(r.passed);
    EXPECT_GT(r.max_abs_diff, 1e-3);
}

TEST(VerifyIsospectral, RawLevelsWithoutExtrapolation)
{
    VerifyOptions<double> opt;
    opt.extrapolate = false;
    const auto r = verify_isospectral(ho(), std::vector{0.2}, 6, 1e-5, opt);
    EXPECT_FALSE(r.extrapolated);
    EXPECT_EQ(r.max_abs_diff, r.raw_max_abs_diff);
    EXPECT_TRUE(r.passed);
}

TEST(VerifyIsospectral, Inadmissible)
{
    EXPECT_EQ(code_of([] { verify_isospectral(ho(), std::vector{-0.5}, 6, 1e-6); }), ErrorCode::inadmissible);
    EXPECT_EQ(code_of([] { verify_isospectral(ho(), std::vector<double>{}, 6, 1e-6); }), ErrorCode::inadmissible);
}
