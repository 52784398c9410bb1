#include <gtest/gtest.h>

#include <array>
#include <map>
#include <random>

#include "thlab/coefficients.hpp"

using namespace thlab;

namespace {

// Independent harmonic-balance oracle.  Fields are polynomials in the
// symbols A, conj(A), B, conj(B); a monomial A^a Ab^b B^c Bb^d carries the
// spatial wave number a - b + c - d and the temporal frequency -c_p (c - d).
using Key = std::array<int, 4>;
using Poly = std::map<Key, cplx>;

Poly mul(const Poly& x, const Poly& y) {
    Poly out;
    for (const auto& [kx, cx] : x)
        for (const auto& [ky, cy] : y) {
            Key k{kx[0] + ky[0], kx[1] + ky[1], kx[2] + ky[2], kx[3] + ky[3]};
            out[k] += cx * cy;
        }
    return out;
}

Poly axpy(cplx a, const Poly& x, Poly y) {
    for (const auto& [k, c] : x) y[k] += a * c;
    return y;
}

int wave_number(const Key& k) { return k[0] - k[1] + k[2] - k[3]; }

// Solves  d/dt w = L(m) w + rhs  monomial by monomial.
Poly solve(const Poly& rhs, double cp, bool hopf) {
    Poly out;
    for (const auto& [k, c] : rhs) {
        const double m = wave_number(k), nu = -cp * (k[2] - k[3]);
        const double s = 1.0 - m * m;
        const cplx L = hopf ? cplx(-s * s, -cp * m * m * m) : cplx(-s * s, 0.0);
        out[k] = c / (I * nu - L);
    }
    return out;
}

AmplitudeCoefficients harmonic_balance(const NonlinearityCoeffs& n, double cp) {
    const Poly u1{{{1, 0, 0, 0}, 1.0}, {{0, 1, 0, 0}, 1.0}};
    const Poly v1{{{0, 0, 1, 0}, 1.0}, {{0, 0, 0, 1}, 1.0}};
    const Poly uu = mul(u1, u1), uv = mul(u1, v1), vv = mul(v1, v1);
    const Poly u2 = solve(axpy(n.f20, uu, axpy(n.f11, uv, axpy(n.f02, vv, {}))), cp, false);
    const Poly v2 = solve(axpy(n.g20, uu, axpy(n.g11, uv, axpy(n.g02, vv, {}))), cp, true);
    const Poly u1u2 = mul(u1, u2), u1v2 = mul(u1, v2), u2v1 = mul(u2, v1), v1v2 = mul(v1, v2);
    const Poly uuu = mul(uu, u1), uuv = mul(uu, v1), uvv = mul(uv, v1), vvv = mul(vv, v1);

    auto cubic = [&](double c20, double c11, double c02, double c30, double c21, double c12, double c03) {
        Poly r = axpy(2.0 * c20, u1u2, {});
        r = axpy(c11, u1v2, r);
        r = axpy(c11, u2v1, r);
        r = axpy(2.0 * c02, v1v2, r);
        r = axpy(c30, uuu, r);
        r = axpy(c21, uuv, r);
        r = axpy(c12, uvv, r);
        return axpy(c03, vvv, r);
    };
    Poly cu = cubic(n.f20, n.f11, n.f02, n.f30, n.f21, n.f12, n.f03);
    Poly cv = cubic(n.g20, n.g11, n.g02, n.g30, n.g21, n.g12, n.g03);

    const Key AAAb{2, 1, 0, 0}, ABBb{1, 0, 1, 1}, AABb{2, 0, 0, 1}, AAbB{1, 1, 1, 0}, BBBb{0, 0, 2, 1},
        AbBB{0, 1, 2, 0};
    AmplitudeCoefficients g;
    g(1) = cu[AAAb];
    g(2) = cu[ABBb];
    g(3) = cu[AABb];
    g(4) = cu[AAbB];
    g(5) = cu[BBBb];
    g(6) = cu[AbBB];
    g(7) = cv[AAbB];
    g(8) = cv[BBBb];
    g(9) = cv[AAAb];
    g(10) = cv[ABBb];
    g(11) = cv[AABb];
    g(12) = cv[AbBB];
    return g;
}

NonlinearityCoeffs random_coeffs(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    NonlinearityCoeffs n;
    for (double* c : {&n.f20, &n.f11, &n.f02, &n.f30, &n.f21, &n.f12, &n.f03, &n.g20, &n.g11, &n.g02,
                      &n.g30, &n.g21, &n.g12, &n.g03})
        *c = u(rng);
    return n;
}

}  // namespace

TEST(Gammas, CubicAnchors) {
    NonlinearityCoeffs n;
    n.f30 = 1.0;
    auto g = compute_gammas(n, 1.0);
    EXPECT_NEAR(std::abs(g(1) - 3.0), 0.0, 1e-14);
    NonlinearityCoeffs m;
    m.g03 = 1.0;
    g = compute_gammas(m, 1.0);
    EXPECT_NEAR(std::abs(g(8) - 3.0), 0.0, 1e-14);
}

TEST(Gammas, ZeroInputGivesZero) {
    const auto g = compute_gammas(NonlinearityCoeffs{}, 0.7, GammaOptions{true});
    for (int j = 1; j <= 12; ++j) EXPECT_EQ(g(j), cplx(0.0)) << "gamma" << j;
}

TEST(Gammas, QuarantinedStayZeroByDefault) {
    std::mt19937_64 rng(3);
    const auto g = compute_gammas(random_coeffs(rng), 1.3);
    EXPECT_EQ(g(4), cplx(0.0));
    EXPECT_EQ(g(5), cplx(0.0));
}

TEST(Gammas, AgreeWithHarmonicBalance) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto n = random_coeffs(rng);
        const double cp = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
        const auto g = compute_gammas(n, cp);
        const auto h = harmonic_balance(n, cp);
        for (int j : {1, 2, 3, 6, 7, 8, 9, 10, 11, 12})
            EXPECT_LT(std::abs(g(j) - h(j)), 1e-11 * (1.0 + std::abs(h(j))))
                << "gamma" << j << " cp=" << cp << " got " << g(j) << " want " << h(j);
    }
}

TEST(Gammas, LinearInCubicCoefficients) {
    // Cubic Taylor coefficients enter additively with fixed weights.
    NonlinearityCoeffs n;
    n.f21 = 1.0;
    EXPECT_NEAR(std::abs(compute_gammas(n, 1.0)(3) - 1.0), 0.0, 1e-14);
    NonlinearityCoeffs m;
    m.g30 = 1.0;
    EXPECT_NEAR(std::abs(compute_gammas(m, 1.0)(9) - 3.0), 0.0, 1e-14);
}

TEST(Gammas, AveragedOnlyKeepsFour) {
    std::mt19937_64 rng(5);
    const auto g = compute_gammas(random_coeffs(rng), 0.9);
    const auto a = g.averaged_only();
    for (int j = 1; j <= 12; ++j) {
        const bool kept = j == 1 || j == 2 || j == 7 || j == 8;
        EXPECT_EQ(a(j), kept ? g(j) : cplx(0.0));
    }
}

TEST(Corrections, MatchSecondOrderBalance) {
    std::mt19937_64 rng(7);
    const auto n = random_coeffs(rng);
    const double cp = 1.1;
    const auto c = correction_amplitudes(n, cp);
    const cplx A(0.3, -0.4), B(-0.2, 0.5);
    // At t = 0 every phase factor is 1, so the corrections reduce to sums of
    // quadratic monomials divided by (i nu - L(m)).
    const Poly u1{{{1, 0, 0, 0}, 1.0}, {{0, 1, 0, 0}, 1.0}};
    const Poly v1{{{0, 0, 1, 0}, 1.0}, {{0, 0, 0, 1}, 1.0}};
    const Poly uu = mul(u1, u1), uv = mul(u1, v1), vv = mul(v1, v1);
    const Poly u2 = solve(axpy(n.f20, uu, axpy(n.f11, uv, axpy(n.f02, vv, {}))), cp, false);
    const Poly v2 = solve(axpy(n.g20, uu, axpy(n.g11, uv, axpy(n.g02, vv, {}))), cp, true);
    auto eval = [&](const Poly& p, int m) {
        cplx s = 0.0;
        for (const auto& [k, co] : p)
            if (wave_number(k) == m)
                s += co * std::pow(A, k[0]) * std::pow(std::conj(A), k[1]) * std::pow(B, k[2]) *
                     std::pow(std::conj(B), k[3]);
        return s;
    };
    EXPECT_LT(std::abs(c.A0(A, B, 0.0) - eval(u2, 0)), 1e-14);
    EXPECT_LT(std::abs(c.A2(A, B, 0.0) - eval(u2, 2)), 1e-14);
    EXPECT_LT(std::abs(c.B0(A, B, 0.0) - eval(v2, 0)), 1e-14);
    EXPECT_LT(std::abs(c.B2(A, B, 0.0) - eval(v2, 2)), 1e-14);
}

TEST(Gammas, FiniteForRealPhaseVelocity) {
    // Every denominator has a nonzero constant or imaginary part.
    NonlinearityCoeffs n;
    n.f11 = n.g20 = 1.0;
    for (double cp : {-5.0, -1.0, 0.0, 1.0, 5.0}) EXPECT_NO_THROW(compute_gammas(n, cp));
}

TEST(Rescaling, FormulasAndErrors) {
    AmplitudeCoefficients g;
    g(1) = -2.0;
    g(2) = 3.0;
    g(7) = -1.0;
    g(8) = -4.0;
    const auto rp = rescaled_radii_params(1.0, 2.0, g, 1.0, -1.0);
    EXPECT_DOUBLE_EQ(rp.c_tilde, (-1.0 - 1.0) * 1.0 / (1.0 * 2.0));
    EXPECT_DOUBLE_EQ(rp.gA_tilde, 2.0 * 3.0 / (1.0 * 4.0));
    EXPECT_DOUBLE_EQ(rp.gB_tilde, 1.0 * -1.0 / (2.0 * 2.0));
    EXPECT_DOUBLE_EQ(rp.d_tilde, 1.0 - rp.gA_tilde * rp.gB_tilde);
    EXPECT_THROW(rescaled_radii_params(1.0, 1.0, g, 0.0, 1.0), ZeroSpeed);
    g(1) = 1.0;
    EXPECT_THROW(rescaled_radii_params(1.0, 1.0, g, 1.0, 1.0), InvalidSigns);
}
