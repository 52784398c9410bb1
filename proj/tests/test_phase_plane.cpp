#include <gtest/gtest.h>

#include <random>
#include <set>

#include "thlab/phase_plane.hpp"

using namespace thlab;

namespace {

Eigen::Matrix2d fd_jacobian(const Eigen::Vector2d& r, const RadiiParams& rp) {
    const double h = 1e-6;
    Eigen::Matrix2d J;
    for (int i = 0; i < 2; ++i) {
        Eigen::Vector2d e = Eigen::Vector2d::Zero();
        e[i] = h;
        J.col(i) = (radii_rhs(r + e, rp) - radii_rhs(r - e, rp)) / (2.0 * h);
    }
    return J;
}

// Eigenvalues sorted by (real, imag) for comparison.
std::vector<cplx> sorted_eigs(const Eigen::Matrix2d& J) {
    Eigen::EigenSolver<Eigen::Matrix2d> es(J);
    std::vector<cplx> v{es.eigenvalues()[0], es.eigenvalues()[1]};
    std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return v;
}

std::vector<cplx> sorted(std::array<cplx, 2> a) {
    std::vector<cplx> v(a.begin(), a.end());
    std::sort(v.begin(), v.end(), [](cplx x, cplx y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return v;
}

const std::vector<RadiiParams> kSamples = {
    RadiiParams::from(-5, -4, -2), RadiiParams::from(-5, -4, 0.5), RadiiParams::from(-0.5, 0.5, 2),
    RadiiParams::from(-0.5, 0.5, -1.5), RadiiParams::from(1, 2, 2), RadiiParams::from(-2, 1, -2),
    RadiiParams::from(0.3, -0.6, 0.7)};

}  // namespace

TEST(Radii, JacobianMatchesFiniteDifferences) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> d(0.0, 2.0);
    for (const auto& rp : kSamples)
        for (int i = 0; i < 20; ++i) {
            const Eigen::Vector2d r(d(rng), d(rng));
            const Eigen::Matrix2d J = radii_jacobian(r, rp), F = fd_jacobian(r, rp);
            EXPECT_LT((J - F).norm(), 1e-7 * std::max(1.0, J.norm()));
        }
}

TEST(Radii, EquilibriaAreZerosWithAnalyticSpectra) {
    for (const auto& rp : kSamples)
        for (const auto& e : find_equilibria(rp)) {
            EXPECT_LT(radii_rhs(e.position, rp).norm(), 1e-13) << to_string(e.kind);
            const auto num = sorted_eigs(fd_jacobian(e.position, rp));
            const auto ana = sorted(e.eigenvalues);
            for (int i = 0; i < 2; ++i)
                EXPECT_LT(std::abs(num[i] - ana[i]), 1e-7 * std::max(1.0, std::abs(ana[i])))
                    << to_string(e.kind) << " c=" << rp.c_tilde;
        }
}

TEST(Radii, NtDeterminantAndTrace) {
    for (const auto& rp : kSamples) {
        const auto nt = nt_position(rp);
        if (!nt) continue;
        const Eigen::Matrix2d J = radii_jacobian(*nt, rp);
        EXPECT_NEAR(nt_determinant(rp), J.determinant(), 1e-8 * std::abs(J.determinant()));
        EXPECT_NEAR(nt_trace(rp), J.trace(), 1e-8 * std::max(1.0, std::abs(J.trace())));
    }
}

TEST(Radii, InvariantAxes) {
    const auto rp = RadiiParams::from(-5, -4, -2);
    auto f = [&](double, const Vec<2>& y) -> Vec<2> { return radii_rhs(y, rp); };
    for (const Vec<2>& y0 : {Vec<2>(0.0, 0.4), Vec<2>(0.7, 0.0)}) {
        double worst = 0.0;
        const int axis = y0[0] == 0.0 ? 0 : 1;
        auto obs = [&](double, const Vec<2>& y) {
            worst = std::max(worst, std::abs(y[axis]));
            return true;
        };
        dopri5<2>(f, 0.0, y0, 50.0, OdeOptions{}, obs);
        dopri5<2>(f, 0.0, y0, -50.0, OdeOptions{}, obs);
        EXPECT_LT(worst, 1e-12);
    }
}

TEST(Radii, ZeroSpeedRejected) {
    const auto rp = RadiiParams::from(-5, -4, 0.0);
    EXPECT_THROW(radii_rhs(Eigen::Vector2d(0.5, 0.5), rp), ZeroCTilde);
    EXPECT_THROW(find_equilibria(rp), ZeroCTilde);
}

TEST(Regime, StabilityTableAlongC) {
    const std::vector<std::pair<double, Stability>> table = {
        {-2.0, Stability::saddle}, {0.5, Stability::stable}, {0.75, Stability::centre}, {2.0, Stability::unstable}};
    for (const auto& [c, want] : table) {
        const auto rp = RadiiParams::from(-5, -4, c);
        EXPECT_DOUBLE_EQ(rp.d_tilde, -19.0);
        const auto rep = classify_NT(rp);
        ASSERT_TRUE(rep.NT_class.has_value());
        EXPECT_EQ(*rep.NT_class, want) << "c=" << c;
        ASSERT_TRUE(rep.c_star.has_value());
        EXPECT_NEAR(*rep.c_star, 0.75, 1e-12);
    }
}

TEST(Regime, ComplexWindowMatchesDiscriminant) {
    const double gA = -5, gB = -4;
    const auto rep = classify_NT(RadiiParams::from(gA, gB, 1.0));
    ASSERT_TRUE(rep.complex_window.has_value());
    const auto [lo, hi] = *rep.complex_window;
    EXPECT_LT(lo, 0.75);
    EXPECT_GT(hi, 0.75);
    // Independent check: complex NT eigenvalues exactly inside the window.
    for (double c : {lo * 0.9, lo * 1.1, 1.0, 10.0, hi * 0.99, hi * 1.01}) {
        const auto rp = RadiiParams::from(gA, gB, c);
        const Eigen::Matrix2d J = radii_jacobian(*nt_position(rp), rp);
        const double disc = J.trace() * J.trace() / 4.0 - J.determinant();
        EXPECT_EQ(disc < 0.0, c > lo && c < hi) << "c=" << c;
    }
}

TEST(Regime, NtAbsentThrows) { EXPECT_THROW(classify_NT(RadiiParams::from(1, 2, 2)), NTAbsent); }

TEST(Regime, PredictionsPerQuadrant) {
    using K = EqKind;
    auto has = [](const RegimeReport& r, K s, K t) {
        for (const auto& o : r.predicted_orbits)
            if (o.source == s && o.target == t) return true;
        return false;
    };
    const auto a = classify_regime(RadiiParams::from(-5, -4, -2));
    EXPECT_TRUE(has(a, K::ST_A, K::NT) && has(a, K::ST_B, K::NT) && has(a, K::NT, K::T));
    const auto b = classify_regime(RadiiParams::from(-0.5, 0.5, 2));
    EXPECT_TRUE(has(b, K::ST_A, K::NT) && has(b, K::NT, K::ST_B));
    const auto c = classify_regime(RadiiParams::from(1, 2, 2));
    EXPECT_TRUE(has(c, K::ST_A, K::ST_B));
    const auto d = classify_regime(RadiiParams::from(-2, 1, 2));
    for (const auto& o : d.predicted_orbits) {
        const bool axis = (o.source == K::ST_A && o.target == K::T) || o.source == K::T || o.target == K::T;
        EXPECT_TRUE(axis);
    }
}

TEST(Heteroclinic, SaddleCaseConnections) {
    const auto rp = RadiiParams::from(-5, -4, -2);
    for (auto [s, t] : {std::pair{EqKind::ST_A, EqKind::NT}, std::pair{EqKind::ST_B, EqKind::NT},
                        std::pair{EqKind::NT, EqKind::T}}) {
        const auto p = heteroclinic(rp, s, t, 1e-7);
        EXPECT_LT(p.endpoint_error, 1e-6) << to_string(s) << "->" << to_string(t);
        const auto& first = p.samples.front();
        EXPECT_LT((Eigen::Vector2d(first.rA, first.rB) - p.source.position).norm(), 1e-5);
        for (std::size_t i = 1; i < p.samples.size(); ++i) EXPECT_GE(p.samples[i].xi, p.samples[i - 1].xi);
    }
}

TEST(Heteroclinic, PositiveDeterminantConnections) {
    const auto rp = RadiiParams::from(-0.5, 0.5, 2);
    EXPECT_LT(heteroclinic(rp, EqKind::ST_A, EqKind::NT, 1e-7).endpoint_error, 1e-6);
    EXPECT_LT(heteroclinic(rp, EqKind::NT, EqKind::ST_B, 1e-7).endpoint_error, 1e-6);
}

TEST(Heteroclinic, AxisConnection) {
    const auto rp = RadiiParams::from(-5, -4, -2);
    const auto p = heteroclinic(rp, EqKind::ST_A, EqKind::T, 1e-7);
    for (const auto& s : p.samples) EXPECT_EQ(s.rB, 0.0);
    EXPECT_LT(p.endpoint_error, 1e-6);
}

TEST(Heteroclinic, FamilyFromUnstableNode) {
    ShootingOptions so;
    so.fan_size = 64;
    const auto fan = heteroclinic_fan(RadiiParams::from(1, 2, 2), EqKind::ST_A, 1e-6, so);
    std::set<double> hits;
    for (const auto& f : fan)
        if (f.outcome.limit == EqKind::ST_B) hits.insert(f.angle);
    EXPECT_GE(hits.size(), 10u);
}

TEST(Heteroclinic, RejectsUnsupportedCases) {
    EXPECT_THROW(heteroclinic(RadiiParams::from(-5, -4, 0.75), EqKind::ST_B, EqKind::NT, 1e-7),
                 UnsupportedClass);
    EXPECT_THROW(heteroclinic(RadiiParams::from(1, 2, 2), EqKind::ST_A, EqKind::NT, 1e-7), NTAbsent);
    EXPECT_THROW(heteroclinic(RadiiParams::from(-5, -4, -2), EqKind::T, EqKind::T, 1e-7), Error);
}

TEST(Heteroclinic, MissReportsOmegaLimit) {
    // ST_B -> ST_A runs the other way when c > 0 in this regime.
    try {
        heteroclinic(RadiiParams::from(-2, 1, 2), EqKind::ST_A, EqKind::ST_B, 1e-7);
        FAIL() << "expected NoConnection";
    } catch (const NoConnection& e) {
        EXPECT_FALSE(e.omega_limit.empty());
    } catch (const UnsupportedClass&) {
    }
}

TEST(Regime, ReversedSaddleExample) {
    const auto rp = RadiiParams::from(-2, 1, -2);
    EXPECT_LT(heteroclinic(rp, EqKind::ST_B, EqKind::ST_A, 1e-7).endpoint_error, 1e-6);
}

TEST(SlowFlow, WaveNumbersFormula) {
    AmplitudeCoefficients g;
    g(1) = {-1.0, 0.3};
    g(2) = {-0.5, -0.2};
    g(7) = {-0.4, 0.7};
    g(8) = {-1.0, 0.1};
    const auto w = slow_flow_wavenumbers(0.8, 0.6, g, 0.5, -0.2, 1.5, -1.0);
    EXPECT_NEAR(w.psi_A, (0.5 - 0.3 * 0.64 + 0.2 * 0.36) / 1.5, 1e-15);
    EXPECT_NEAR(w.psi_B, (0.2 + 0.7 * 0.64 + 0.1 * 0.36) / (-2.5), 1e-15);
    EXPECT_THROW(slow_flow_wavenumbers(0.8, 0.6, g, 0.5, -0.2, 0.0, 1.0), ZeroSpeed);
    EXPECT_THROW(slow_flow_wavenumbers(0.8, 0.6, g, 0.5, -0.2, 1.0, 1.0), ZeroSpeed);
}

TEST(Portrait, TrajectoriesFollowTheFlow) {
    const auto tr = phase_portrait(RadiiParams::from(-5, -4, -2), 3, 1.5, 2.0);
    ASSERT_EQ(tr.size(), 9u);
    for (const auto& t : tr) EXPECT_GE(t.size(), 2u);
}

TEST(Names, RoundTrip) {
    for (auto k : {EqKind::T, EqKind::ST_A, EqKind::ST_B, EqKind::NT})
        EXPECT_EQ(eq_kind_from_string(to_string(k)), k);
    EXPECT_FALSE(eq_kind_from_string("XY").has_value());
}
