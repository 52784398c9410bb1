#include <gtest/gtest.h>

#include <cmath>

#include "thlab/validation.hpp"

using namespace thlab;

TEST(ScalingFit, ExactPowerLaws) {
    for (double p : {1.0, 2.0, 3.0}) {
        std::vector<std::pair<double, double>> pts;
        for (double e : {0.1, 0.07, 0.05}) pts.emplace_back(e, 3.0 * std::pow(e, p));
        const auto r = scaling_fit(pts);
        EXPECT_NEAR(r.slope, p, 1e-12);
        EXPECT_NEAR(r.intercept, std::log(3.0), 1e-12);
        EXPECT_EQ(r.eps_values.size(), 3u);
    }
}

TEST(ScalingFit, RejectsDegenerateData) {
    EXPECT_THROW(scaling_fit({{0.1, 1.0}, {0.05, 0.5}}), DegenerateData);
    EXPECT_THROW(scaling_fit({{0.1, 1.0}, {0.05, 0.0}, {0.02, 0.1}}), DegenerateData);
    EXPECT_THROW(scaling_fit({{0.1, 1.0}, {-0.05, 0.1}, {0.02, 0.1}}), DegenerateData);
    EXPECT_THROW(scaling_fit({{0.1, 1.0}, {0.1, 0.5}, {0.1, 0.1}}), DegenerateData);
}

TEST(Harness, ZeroDataGivesZeroError) {
    ApproximationSetup s;
    s.p = ModelParams{1.0, 1.0, -1.0, 0.1};
    s.n_pde = 64;
    s.periods = 4;
    s.n_amp = 16;
    s.snapshots = 2;
    s.T0 = 0.1;
    EXPECT_EQ(approximation_error(0.2, s), 0.0);

    AveragingSetup a;
    a.p = ModelParams{1.0, 1.0, 1.0, 0.1};
    a.slow = Grid1D{16, 8.0};
    a.snapshots = 2;
    a.ic = constant_amplitudes(0.5, 0.5);
    a.g(1) = -1.0;
    a.g(8) = -1.0;
    // Without oscillatory coefficients the two systems coincide.
    EXPECT_LT(averaging_error(0.2, a), 1e-14);
}

TEST(Harness, SemiTrivialBenchmarkStartsOnTheWave) {
    const auto s = semi_trivial_benchmark();
    const auto g = compute_gammas(s.nl, velocities(s.p).c_p);
    ASSERT_LT(g.re(1), 0.0);
    const auto ic = s.ic(Grid1D{16, 1.0});
    EXPECT_NEAR(std::norm(ic.A[0]) * g.re(1) + s.p.alpha_u, 0.0, 1e-14);
    EXPECT_EQ(ic.B[0], cplx(0.0));
}

TEST(Harness, CriticalBandResidualIsThirdOrder) {
    const auto s = semi_trivial_benchmark();
    std::vector<std::pair<double, double>> pts;
    for (double eps : {0.1, 0.05, 0.025})
        pts.emplace_back(eps, critical_band_residual(eps, s.p, s.nl, cplx(0.4, 0.1), cplx(0.2, -0.3), 0.3));
    EXPECT_NEAR(scaling_fit(pts).slope, 3.0, 0.3);
}

TEST(Harness, AveragingErrorShrinksWithEps) {
    auto s = generic_averaging_benchmark();
    s.slow = Grid1D{16, 8.0 * std::numbers::pi};
    s.snapshots = 10;
    const double e1 = averaging_error(0.2, s), e2 = averaging_error(0.1, s);
    EXPECT_GT(e1, 0.0);
    EXPECT_LT(e2, e1);
}

TEST(Sweep, ParallelMatchesSerial) {
    const std::vector<double> eps{0.1, 0.2, 0.3, 0.4, 0.5};
    auto f = [](double e) { return std::sin(e) * e; };
    const auto a = sweep(eps, f, 1), b = sweep(eps, f, 3);
    EXPECT_EQ(a, b);
    for (std::size_t i = 0; i < eps.size(); ++i) EXPECT_EQ(a[i], f(eps[i]));
}

TEST(Sweep, PropagatesErrors) {
    auto f = [](double e) -> double {
        if (e > 0.25) throw DegenerateData("boom");
        return e;
    };
    EXPECT_THROW(sweep({0.1, 0.2, 0.3}, f, 2), DegenerateData);
}
