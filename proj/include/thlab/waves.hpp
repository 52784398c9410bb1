#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "coefficients.hpp"
#include "fast_slow.hpp"
#include "model.hpp"
#include "phase_plane.hpp"
#include "spectral.hpp"

namespace thlab {

enum class WaveKind { trivial, semiA, semiB, nontrivial };

inline std::string to_string(WaveKind k) {
    switch (k) {
        case WaveKind::trivial: return "trivial";
        case WaveKind::semiA: return "semiA";
        case WaveKind::semiB: return "semiB";
        case WaveKind::nontrivial: return "nontrivial";
    }
    return "?";
}

// A = r_A e^{i(eps kA X + omega_A T)},  B = r_B e^{i(eps kB X + omega_B T)}.
struct SpaceTimeWave {
    double r_A = 0.0, r_B = 0.0;
    double omega_A = 0.0, omega_B = 0.0;
    double k_A_tilde = 0.0, k_B_tilde = 0.0;
    WaveKind kind = WaveKind::trivial;
};

struct WaveSystem {
    double alpha_u = 1.0, alpha_v = 1.0;
    AmplitudeCoefficients g;
    double c_g = 3.0, c_v = 1.0;
};

// Residuals of the four real equations for space-time periodic waves.
inline Eigen::Vector4d wave_residuals(const SpaceTimeWave& w, const WaveSystem& s, double eps) {
    const double a2 = w.r_A * w.r_A, b2 = w.r_B * w.r_B, e2 = eps * eps;
    const auto& g = s.g;
    const double kA = w.k_A_tilde, kB = w.k_B_tilde;
    return {w.r_A * (s.alpha_u + g.re(1) * a2 + g.re(2) * b2) - 4.0 * e2 * w.r_A * kA * kA,
            w.r_A * (-w.omega_A + g.im(1) * a2 + g.im(2) * b2),
            w.r_B * (s.alpha_v + g.re(7) * a2 + g.re(8) * b2) - 4.0 * e2 * w.r_B * kB * kB,
            w.r_B * (-w.omega_B - s.c_g * kB + g.im(7) * a2 + g.im(8) * b2) -
                3.0 * e2 * s.c_v * w.r_B * kB * kB};
}

// r^2 = -alpha/Re(gamma); the frequency follows from the imaginary part
// of the same equation, omega = Im(gamma) r^2.
inline SpaceTimeWave semi_trivial_wave(double alpha, cplx gamma, char which) {
    if (which != 'A' && which != 'B') throw Error("which must be 'A' or 'B'");
    if (!(alpha * gamma.real() < 0.0))
        throw NoExistence("semi-trivial wave needs alpha * Re(gamma) < 0");
    const double r2 = -alpha / gamma.real();
    SpaceTimeWave w;
    if (which == 'A') {
        w.r_A = std::sqrt(r2);
        w.omega_A = gamma.imag() * r2;
        w.kind = WaveKind::semiA;
    } else {
        w.r_B = std::sqrt(r2);
        w.omega_B = gamma.imag() * r2;
        w.kind = WaveKind::semiB;
    }
    return w;
}

inline SpaceTimeWave nontrivial_wave(double alpha_u, double alpha_v, const AmplitudeCoefficients& g) {
    const double d = g.re(1) * g.re(8) - g.re(2) * g.re(7);
    if (d == 0.0) throw Degenerate("gamma_1r gamma_8r - gamma_2r gamma_7r vanishes");
    const double qa = (g.re(8) * alpha_u - g.re(2) * alpha_v) / d;
    const double qb = (g.re(1) * alpha_v - g.re(7) * alpha_u) / d;
    if (!(qa < 0.0 && qb < 0.0)) throw NoExistence("fully nontrivial wave needs both quotients negative");
    SpaceTimeWave w;
    w.r_A = std::sqrt(-qa);
    w.r_B = std::sqrt(-qb);
    w.omega_A = g.im(1) * (-qa) + g.im(2) * (-qb);
    w.omega_B = g.im(7) * (-qa) + g.im(8) * (-qb);
    w.kind = WaveKind::nontrivial;
    return w;
}

// The wave system is linear in (r_A^2, r_B^2, omega_A, omega_B) once the
// kind fixes which radii vanish, so the solution is explicit.
inline SpaceTimeWave space_time_wave(const WaveSystem& s, WaveKind kind, double kA, double kB,
                                     double eps) {
    const double e2 = eps * eps;
    const double au = s.alpha_u - 4.0 * e2 * kA * kA;
    const double av = s.alpha_v - 4.0 * e2 * kB * kB;
    const auto& g = s.g;
    SpaceTimeWave w;
    switch (kind) {
        case WaveKind::trivial: break;
        case WaveKind::semiA: w = semi_trivial_wave(au, g(1), 'A'); break;
        case WaveKind::semiB: w = semi_trivial_wave(av, g(8), 'B'); break;
        case WaveKind::nontrivial: w = nontrivial_wave(au, av, g); break;
    }
    // Base existence at eps = 0 is part of the contract.
    if (kind == WaveKind::semiA) semi_trivial_wave(s.alpha_u, g(1), 'A');
    if (kind == WaveKind::semiB) semi_trivial_wave(s.alpha_v, g(8), 'B');
    if (kind == WaveKind::nontrivial) nontrivial_wave(s.alpha_u, s.alpha_v, g);

    w.kind = kind;
    w.k_A_tilde = kA;
    w.k_B_tilde = kB;
    w.omega_A = g.im(1) * w.r_A * w.r_A + g.im(2) * w.r_B * w.r_B;
    w.omega_B = g.im(7) * w.r_A * w.r_A + g.im(8) * w.r_B * w.r_B - s.c_g * kB - 3.0 * e2 * s.c_v * kB * kB;
    if (kind == WaveKind::trivial) w.omega_A = w.omega_B = 0.0;
    return w;
}

struct PatternField {
    double t = 0.0;
    rvec x, u, v;
};

inline PatternField leading_order_field(const SpaceTimeWave& w, double eps, const ModelParams& p,
                                        double t, const Grid1D& grid) {
    grid.validate();
    const double cp = velocities(p).c_p, e2 = eps * eps;
    PatternField f{t, rvec(grid.n), rvec(grid.n), rvec(grid.n)};
    for (int j = 0; j < grid.n; ++j) {
        const double x = grid.x(j);
        f.x[j] = x;
        f.u[j] = 2.0 * eps * w.r_A * std::cos((1.0 + e2 * w.k_A_tilde) * x + e2 * w.omega_A * t);
        f.v[j] = 2.0 * eps * w.r_B *
                 std::cos((1.0 + e2 * w.k_B_tilde) * x - cp * t + e2 * w.omega_B * t);
    }
    return f;
}

// Radii and phases of a front in physical units along xi = eps^2 (x - c0 t).
struct FrontProfile {
    std::vector<double> xi, rA, rB, phiA, phiB;
    double psiA_lo = 0, psiA_hi = 0, psiB_lo = 0, psiB_hi = 0;  // limiting wave numbers
};

// Converts a rescaled planar orbit to physical radii and integrates the
// local wave numbers into phases (trapezoidal rule).  The profile is
// shifted so that xi = 0 sits halfway between source and target.  For
// c0 < 0 the physical xi runs against the orbit, so samples are reversed.
inline FrontProfile front_profile(const OrbitPath& orbit, const FrontContext& c) {
    if (orbit.samples.size() < 2) throw GridMismatch("orbit needs at least two samples");
    FrontProfile fp;
    const double sA = c.rA_scale(), sB = c.rB_scale(), xs = c.c0 / c.alpha_u;
    std::vector<OrbitSample> samples = orbit.samples;
    if (xs < 0.0) std::reverse(samples.begin(), samples.end());
    std::vector<double> pa, pb;
    for (const auto& s : samples) {
        fp.xi.push_back(s.xi * xs);
        fp.rA.push_back(s.rA * sA);
        fp.rB.push_back(s.rB * sB);
        const auto psi = slow_flow_wavenumbers(s.rA * sA, s.rB * sB, c.g, c.omega_A, c.omega_B, c.c0, c.cg);
        pa.push_back(psi.psi_A);
        pb.push_back(psi.psi_B);
    }
    const std::size_t n = fp.xi.size();
    fp.phiA.assign(n, 0.0);
    fp.phiB.assign(n, 0.0);
    std::size_t mid = 0;
    double best = 1e300;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            const double h = fp.xi[i] - fp.xi[i - 1];
            if (!(h > 0.0)) throw GridMismatch("orbit samples must be strictly increasing in xi");
            fp.phiA[i] = fp.phiA[i - 1] + 0.5 * h * (pa[i] + pa[i - 1]);
            fp.phiB[i] = fp.phiB[i - 1] + 0.5 * h * (pb[i] + pb[i - 1]);
        }
        const auto& s = samples[i];
        const Eigen::Vector2d r(s.rA, s.rB);
        const double gap = std::abs((r - orbit.source.position).norm() - (r - orbit.target.position).norm());
        if (gap < best) {
            best = gap;
            mid = i;
        }
    }
    const double x0 = fp.xi[mid];
    for (auto& x : fp.xi) x -= x0;
    fp.psiA_lo = pa.front();
    fp.psiA_hi = pa.back();
    fp.psiB_lo = pb.front();
    fp.psiB_hi = pb.back();
    return fp;
}

namespace detail {

// Cubic Hermite interpolation with finite-difference slopes; constant
// (radii) or linear (phases) extension beyond the sampled range.
inline double hermite(const std::vector<double>& xs, const std::vector<double>& ys, double x,
                      double slope_lo, double slope_hi) {
    const std::size_t n = xs.size();
    if (x <= xs.front()) return ys.front() + slope_lo * (x - xs.front());
    if (x >= xs.back()) return ys.back() + slope_hi * (x - xs.back());
    const std::size_t i = std::size_t(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
    auto slope = [&](std::size_t k) {
        if (k == 0) return (ys[1] - ys[0]) / (xs[1] - xs[0]);
        if (k == n - 1) return (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
        return (ys[k + 1] - ys[k - 1]) / (xs[k + 1] - xs[k - 1]);
    };
    const double h = xs[i + 1] - xs[i], s = (x - xs[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * ys[i] + h10 * h * slope(i) + h01 * ys[i + 1] + h11 * h * slope(i + 1);
}

}  // namespace detail

// u = 2 eps r_A(xi) cos(x + phi_A(xi) + eps^2 w_A t),
// v = 2 eps r_B(xi) cos(x - c_p t + phi_B(xi) + eps^2 w_B t),
// with xi = eps^2 (x - x0 - c0 t).
inline PatternField front_field(const FrontProfile& fp, const FrontContext& c, double eps,
                                const ModelParams& p, double t, const Grid1D& grid, double x0) {
    grid.validate();
    if (fp.xi.size() < 2 || fp.rA.size() != fp.xi.size() || fp.phiA.size() != fp.xi.size())
        throw GridMismatch("front profile arrays are inconsistent");
    const double cp = velocities(p).c_p, e2 = eps * eps;
    PatternField f{t, rvec(grid.n), rvec(grid.n), rvec(grid.n)};
    const double rA_max = *std::max_element(fp.rA.begin(), fp.rA.end());
    const double rB_max = *std::max_element(fp.rB.begin(), fp.rB.end());
    for (int j = 0; j < grid.n; ++j) {
        const double x = grid.x(j);
        const double xi = e2 * (x - x0 - c.c0 * t);
        // Radii are clamped to the sampled range to keep the bound exact.
        const double rA = std::clamp(detail::hermite(fp.xi, fp.rA, xi, 0.0, 0.0), 0.0, rA_max);
        const double rB = std::clamp(detail::hermite(fp.xi, fp.rB, xi, 0.0, 0.0), 0.0, rB_max);
        const double pA = detail::hermite(fp.xi, fp.phiA, xi, fp.psiA_lo, fp.psiA_hi);
        const double pB = detail::hermite(fp.xi, fp.phiB, xi, fp.psiB_lo, fp.psiB_hi);
        f.x[j] = x;
        f.u[j] = 2.0 * eps * rA * std::cos(x + pA + e2 * c.omega_A * t);
        f.v[j] = 2.0 * eps * rB * std::cos(x - cp * t + pB + e2 * c.omega_B * t);
    }
    return f;
}

}  // namespace thlab
