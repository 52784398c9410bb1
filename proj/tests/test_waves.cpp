#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "thlab/fast_slow.hpp"
#include "thlab/spectral.hpp"
#include "thlab/waves.hpp"

using namespace thlab;

namespace {

constexpr double pi = std::numbers::pi;

WaveSystem sample_system() {
    WaveSystem s;
    s.alpha_u = 1.0;
    s.alpha_v = 0.8;
    s.g(1) = {-1.0, 0.3};
    s.g(2) = {-0.5, 0.2};
    s.g(7) = {-0.4, -0.1};
    s.g(8) = {-1.0, 0.5};
    s.c_g = 3.0;
    s.c_v = 1.0;
    return s;
}

// Residual of the averaged amplitude equations for the explicit plane wave,
// with X and T derivatives taken by central differences.
double pde_residual(const SpaceTimeWave& w, const WaveSystem& s, double eps) {
    auto A = [&](double X, double T) { return w.r_A * std::exp(I * (eps * w.k_A_tilde * X + w.omega_A * T)); };
    auto B = [&](double X, double T) { return w.r_B * std::exp(I * (eps * w.k_B_tilde * X + w.omega_B * T)); };
    const double X = 0.37, T = 0.21, h = 1e-4;
    const cplx a = A(X, T), b = B(X, T);
    const cplx aT = (A(X, T + h) - A(X, T - h)) / (2 * h), bT = (B(X, T + h) - B(X, T - h)) / (2 * h);
    const cplx bX = (B(X + h, T) - B(X - h, T)) / (2 * h);
    const cplx aXX = (A(X + h, T) - 2.0 * a + A(X - h, T)) / (h * h);
    const cplx bXX = (B(X + h, T) - 2.0 * b + B(X - h, T)) / (h * h);
    const auto& g = s.g;
    const cplx ra = aT - (4.0 * aXX + s.alpha_u * a + g(1) * a * std::norm(a) + g(2) * a * std::norm(b));
    const cplx rb = bT - ((4.0 + 3.0 * I * s.c_v) * bXX - s.c_g / eps * bX + s.alpha_v * b +
                          g(7) * b * std::norm(a) + g(8) * b * std::norm(b));
    return std::max(std::abs(ra), std::abs(rb));
}

}  // namespace

TEST(Waves, ClosedFormsSolveTheWaveSystem) {
    const auto s = sample_system();
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (auto kind : {WaveKind::trivial, WaveKind::semiA, WaveKind::semiB, WaveKind::nontrivial})
        for (int i = 0; i < 5; ++i) {
            const double eps = 0.1, kA = d(rng), kB = d(rng);
            const auto w = space_time_wave(s, kind, kA, kB, eps);
            EXPECT_LT(wave_residuals(w, s, eps).cwiseAbs().maxCoeff(), 1e-14) << to_string(kind);
            EXPECT_LT(pde_residual(w, s, eps), 1e-6) << to_string(kind);
        }
}

TEST(Waves, KindsHaveTheRightZeroRadii) {
    const auto s = sample_system();
    EXPECT_EQ(space_time_wave(s, WaveKind::semiA, 0, 0, 0.1).r_B, 0.0);
    EXPECT_EQ(space_time_wave(s, WaveKind::semiB, 0, 0, 0.1).r_A, 0.0);
    const auto t = space_time_wave(s, WaveKind::trivial, 0, 0, 0.1);
    EXPECT_EQ(t.r_A + t.r_B + t.omega_A + t.omega_B, 0.0);
    const auto n = space_time_wave(s, WaveKind::nontrivial, 0, 0, 0.1);
    EXPECT_GT(n.r_A, 0.0);
    EXPECT_GT(n.r_B, 0.0);
}

TEST(Waves, SemiTrivialAnchor) {
    const auto w = semi_trivial_wave(2.0, cplx(-0.5, 0.25), 'A');
    EXPECT_DOUBLE_EQ(w.r_A, 2.0);
    EXPECT_DOUBLE_EQ(w.omega_A, 1.0);
    EXPECT_THROW(semi_trivial_wave(1.0, cplx(0.5, 0.0), 'A'), NoExistence);
    EXPECT_THROW(semi_trivial_wave(1.0, cplx(-0.5, 0.0), 'C'), Error);
}

TEST(Waves, NontrivialNeedsNegativeQuotients) {
    auto s = sample_system();
    s.g(2) = {2.0, 0.0};
    s.g(7) = {2.0, 0.0};
    EXPECT_THROW(nontrivial_wave(1.0, 1.0, s.g), NoExistence);
    AmplitudeCoefficients deg;
    deg(1) = deg(2) = deg(7) = deg(8) = 1.0;
    EXPECT_THROW(nontrivial_wave(1.0, 1.0, deg), Degenerate);
}

TEST(Waves, PersistUnderAmplitudeSimulation) {
    // A wave whose wave number fits the periodic slow box is an exact
    // solution of the averaged amplitude system.
    const auto s = sample_system();
    const double eps = 0.1;
    const Grid1D slow{32, 8.0 * pi};
    const double kt = (2.0 * pi / slow.length) / eps;
    const auto w = space_time_wave(s, WaveKind::nontrivial, kt, -kt, eps);
    ModelParams p{1.0, s.alpha_u, s.alpha_v, eps};
    AmpFields ic{cvec(slow.n), cvec(slow.n)};
    auto exact = [&](double X, double T) {
        return std::pair{w.r_A * std::exp(I * (eps * w.k_A_tilde * X + w.omega_A * T)),
                         w.r_B * std::exp(I * (eps * w.k_B_tilde * X + w.omega_B * T))};
    };
    for (int j = 0; j < slow.n; ++j) std::tie(ic.A[j], ic.B[j]) = exact(slow.x(j), 0.0);
    const auto out = run_amplitude_averaged(ic, p, slow, s.g, SimConfig{1e-3, 1.0, Scheme::ETDRK4, true}, {1.0});
    double err = 0.0;
    for (int j = 0; j < slow.n; ++j) {
        const auto [a, b] = exact(slow.x(j), 1.0);
        err = std::max({err, std::abs(out[0].A[j] - a), std::abs(out[0].B[j] - b)});
    }
    EXPECT_LT(err, 1e-8);
}

TEST(Waves, LeadingOrderField) {
    const auto s = sample_system();
    const auto w = space_time_wave(s, WaveKind::nontrivial, 0.5, -0.3, 0.1);
    const Grid1D g{64, 4 * pi};
    const ModelParams p{1.0, 1.0, 0.8, 0.1};
    const auto f = leading_order_field(w, 0.1, p, 2.0, g);
    for (int j = 0; j < g.n; ++j) {
        const double x = g.x(j);
        EXPECT_NEAR(f.u[j], 0.2 * w.r_A * std::cos(x * (1 + 0.01 * 0.5) + 0.01 * w.omega_A * 2.0), 1e-14);
        EXPECT_NEAR(f.v[j], 0.2 * w.r_B * std::cos(x * (1 - 0.01 * 0.3) - 2.0 + 0.01 * w.omega_B * 2.0),
                    1e-14);
        EXPECT_TRUE(std::isfinite(f.u[j]) && std::isfinite(f.v[j]));
    }
}

namespace {

FrontContext front_context(double c0, double cg) {
    AmplitudeCoefficients g;
    g(1) = {-1.0, 0.3};
    g(2) = {-5.0, 0.2};
    g(7) = {-4.0, -0.1};
    g(8) = {-1.0, -0.4};
    return FrontContext::with_semi_trivial_omegas(g, 1.0, 1.0, c0, cg, 1.0);
}

}  // namespace

TEST(Fronts, ProfileIsIncreasingAndCentred) {
    for (double c0 : {1.0, -1.0}) {
        const auto c = front_context(c0, c0 > 0 ? -1.0 : 1.0);
        const auto orbit = heteroclinic(c.radii_params(), EqKind::ST_A, EqKind::T, 1e-7);
        const auto fp = front_profile(orbit, c);
        for (std::size_t i = 1; i < fp.xi.size(); ++i) EXPECT_GT(fp.xi[i], fp.xi[i - 1]);
        EXPECT_LT(fp.xi.front(), 0.0);
        EXPECT_GT(fp.xi.back(), 0.0);
        // A moves from the semi-trivial radius to zero, in physical xi order.
        const double lo = c0 > 0 ? fp.rA.front() : fp.rA.back();
        const double hi = c0 > 0 ? fp.rA.back() : fp.rA.front();
        EXPECT_NEAR(lo, c.rA_scale(), 1e-4);
        EXPECT_NEAR(hi, 0.0, 1e-4);
    }
}

TEST(Fronts, PhasesIntegrateWaveNumbers) {
    const auto c = front_context(1.0, -1.0);
    const auto orbit = heteroclinic(c.radii_params(), EqKind::ST_A, EqKind::NT, 1e-7);
    const auto fp = front_profile(orbit, c);
    // Trapezoidal sums are exact for the derivative at the far ends.
    const std::size_t n = fp.xi.size();
    const double slope = (fp.phiA[n - 1] - fp.phiA[n - 2]) / (fp.xi[n - 1] - fp.xi[n - 2]);
    EXPECT_NEAR(slope, fp.psiA_hi, 1e-3 * (1.0 + std::abs(fp.psiA_hi)));
}

TEST(Fronts, FieldEnvelopeAndAsymptotics) {
    const auto c = front_context(1.0, -1.0);
    const auto orbit = heteroclinic(c.radii_params(), EqKind::ST_A, EqKind::T, 1e-7);
    const auto fp = front_profile(orbit, c);
    const double eps = 0.1;
    const ModelParams p{1.0, 1.0, 1.0, eps};
    const Grid1D g{4096, 2 * pi * 400};
    const double x0 = g.length / 2;
    const auto f = front_field(fp, c, eps, p, 0.0, g, x0);
    const double rmax = *std::max_element(fp.rA.begin(), fp.rA.end());
    double left = 0.0, right = 0.0;
    for (int j = 0; j < g.n; ++j) {
        EXPECT_LE(std::abs(f.u[j]), 2 * eps * rmax + 1e-14);
        if (g.x(j) < 0.1 * g.length) left = std::max(left, std::abs(f.u[j]));
        if (g.x(j) > 0.9 * g.length) right = std::max(right, std::abs(f.u[j]));
    }
    EXPECT_NEAR(left, 2 * eps * c.rA_scale(), 1e-3);
    EXPECT_LT(right, 1e-3);
}

TEST(Fronts, RejectsShortOrbit) {
    const auto c = front_context(1.0, -1.0);
    OrbitPath p;
    p.samples = {{0.0, 1.0, 0.0}};
    EXPECT_THROW(front_profile(p, c), GridMismatch);
}
