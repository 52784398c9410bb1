#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "coefficients.hpp"
#include "ode.hpp"
#include "phase_plane.hpp"

namespace thlab {

// Coefficients and speeds shared by the travelling-front systems.
struct FrontContext {
    AmplitudeCoefficients g;
    double alpha_u = 1.0, alpha_v = 1.0;
    double omega_A = 0.0, omega_B = 0.0;
    double c0 = 1.0, cg = 3.0, cv = 1.0;

    // Frequencies of the semi-trivial waves, the default choice.
    static FrontContext with_semi_trivial_omegas(const AmplitudeCoefficients& g, double alpha_u,
                                                 double alpha_v, double c0, double cg, double cv) {
        FrontContext c{g, alpha_u, alpha_v, 0.0, 0.0, c0, cg, cv};
        if (g.re(1) != 0.0) c.omega_A = -alpha_u * g.im(1) / g.re(1);
        if (g.re(8) != 0.0) c.omega_B = -alpha_v * g.im(8) / g.re(8);
        return c;
    }

    RadiiParams radii_params() const { return rescaled_radii_params(alpha_u, alpha_v, g, c0, cg); }
    double rA_scale() const { return std::sqrt(alpha_u / std::abs(g.re(1))); }
    double rB_scale() const { return std::sqrt(alpha_v / std::abs(g.re(8))); }
};

// Y = (A_r, A_i, B_r, B_i) and X = dY/dxi.
struct FastSlowState {
    Eigen::Vector4d Y = Eigen::Vector4d::Zero();
    Eigen::Vector4d X = Eigen::Vector4d::Zero();

    Vec<8> pack() const {
        Vec<8> v;
        v << Y, X;
        return v;
    }
    static FastSlowState unpack(const Vec<8>& v) { return {v.head<4>(), v.tail<4>()}; }
    cplx A() const { return {Y[0], Y[1]}; }
    cplx B() const { return {Y[2], Y[3]}; }
};

namespace detail {

inline void require_speeds(const FrontContext& c) {
    if (c.c0 == 0.0) throw ZeroSpeed("front speed c_0 must be nonzero");
}

inline cplx nonlin_A(cplx A, cplx B, const FrontContext& c) {
    return c.alpha_u * A + c.g(1) * A * std::norm(A) + c.g(2) * A * std::norm(B);
}
inline cplx nonlin_B(cplx A, cplx B, const FrontContext& c) {
    return c.alpha_v * B + c.g(7) * B * std::norm(A) + c.g(8) * B * std::norm(B);
}

}  // namespace detail

// The critical manifold X = h0(Y), i.e. the slow-flow velocity.
inline Eigen::Vector4d critical_manifold_X(const Eigen::Vector4d& Y, const FrontContext& c) {
    detail::require_speeds(c);
    if (c.cg - c.c0 == 0.0) throw ZeroSpeed("c_g - c_0 must be nonzero");
    const cplx A{Y[0], Y[1]}, B{Y[2], Y[3]};
    const cplx xa = (I * c.omega_A * A - detail::nonlin_A(A, B, c)) / c.c0;
    const cplx xb = -(I * c.omega_B * B - detail::nonlin_B(A, B, c)) / (c.cg - c.c0);
    return {xa.real(), xa.imag(), xb.real(), xb.imag()};
}

inline FastSlowState fastslow_rhs(const FastSlowState& s, double eps, const FrontContext& c) {
    detail::require_speeds(c);
    if (!(eps > 0.0)) throw Error("fast-slow system needs eps > 0");
    const cplx A = s.A(), B = s.B();
    const cplx XA{s.X[0], s.X[1]}, XB{s.X[2], s.X[3]};
    const double e2 = eps * eps;
    // 4 eps^2 X_A' = -c0 X_A + i w_A A - N_A and
    // eps^2 (4 + 3i c_v) X_B' = (c_g - c0) X_B + i w_B B - N_B.
    const cplx dXA = (-c.c0 * XA + I * c.omega_A * A - detail::nonlin_A(A, B, c)) / (4.0 * e2);
    const cplx dXB = ((c.cg - c.c0) * XB + I * c.omega_B * B - detail::nonlin_B(A, B, c)) /
                     ((4.0 + 3.0 * I * c.cv) * e2);
    FastSlowState d;
    d.Y = s.X;
    d.X << dXA.real(), dXA.imag(), dXB.real(), dXB.imag();
    return d;
}

struct CriticalManifoldSpectrum {
    std::array<cplx, 4> eigenvalues;
    bool normally_hyperbolic;
};

// Eigenvalues of D_X H_0 on the critical manifold: -c0/4 twice from the
// A-block and (c_g - c0)/(4 -/+ 3i c_v) from the B-block.
inline CriticalManifoldSpectrum critical_manifold_eigs(double c0, double cg, double cv) {
    const double db = cg - c0;
    return {{cplx(-c0 / 4.0), cplx(-c0 / 4.0), db / (4.0 + 3.0 * I * cv), db / (4.0 - 3.0 * I * cv)},
            c0 != 0.0 && db != 0.0};
}

struct PeriodicOrbitNT {
    double rA, rB, psi_A, psi_B, epsilon;
    double residual;
};

namespace detail {

inline Eigen::Vector4d nt_equations(const Eigen::Vector4d& z, double eps, const FrontContext& c) {
    const double rA = z[0], pA = z[1], rB = z[2], pB = z[3];
    const double a2 = rA * rA, b2 = rB * rB, e2 = eps * eps;
    const auto& g = c.g;
    return {c.alpha_u + g.re(1) * a2 + g.re(2) * b2 - 4.0 * e2 * pA * pA,
            c.c0 * pA - c.omega_A + g.im(1) * a2 + g.im(2) * b2,
            c.alpha_v + g.re(7) * a2 + g.re(8) * b2 - 4.0 * e2 * pB * pB,
            (c.cg - c.c0) * pB + c.omega_B - g.im(7) * a2 - g.im(8) * b2 + 3.0 * e2 * c.cv * pB * pB};
}

inline Eigen::Matrix4d nt_jacobian(const Eigen::Vector4d& z, double eps, const FrontContext& c) {
    const double rA = z[0], pA = z[1], rB = z[2], pB = z[3], e2 = eps * eps;
    const auto& g = c.g;
    Eigen::Matrix4d J;
    J << 2 * g.re(1) * rA, -8 * e2 * pA, 2 * g.re(2) * rB, 0,
        2 * g.im(1) * rA, c.c0, 2 * g.im(2) * rB, 0,
        2 * g.re(7) * rA, 0, 2 * g.re(8) * rB, -8 * e2 * pB,
        -2 * g.im(7) * rA, 0, -2 * g.im(8) * rB, (c.cg - c.c0) + 6 * e2 * c.cv * pB;
    return J;
}

// Residual of the radius-multiplied equations, as displayed.
inline double nt_residual(const Eigen::Vector4d& z, double eps, const FrontContext& c) {
    Eigen::Vector4d F = nt_equations(z, eps, c);
    F[0] *= z[0];
    F[2] *= z[2];
    return F.cwiseAbs().maxCoeff();
}

}  // namespace detail

// Radii of the fully nontrivial wave of the averaged system (eps = 0).
inline std::optional<Eigen::Vector2d> nt_radii_unscaled(const AmplitudeCoefficients& g, double alpha_u,
                                                       double alpha_v) {
    Eigen::Matrix2d M;
    M << g.re(1), g.re(2), g.re(7), g.re(8);
    const double det = M.determinant();
    if (det == 0.0) return std::nullopt;
    const Eigen::Vector2d sq = M.inverse() * Eigen::Vector2d(-alpha_u, -alpha_v);
    if (!(sq[0] > 0.0 && sq[1] > 0.0)) return std::nullopt;
    return Eigen::Vector2d(std::sqrt(sq[0]), std::sqrt(sq[1]));
}

inline PeriodicOrbitNT nt_periodic_orbit(double eps, const FrontContext& c) {
    detail::require_speeds(c);
    if (c.cg - c.c0 == 0.0) throw ZeroSpeed("c_g - c_0 must be nonzero");
    const auto r0 = nt_radii_unscaled(c.g, c.alpha_u, c.alpha_v);
    if (!r0) throw NTAbsent("no fully nontrivial equilibrium of the radii dynamics");
    Eigen::Matrix2d L;  // linearisation of the bracketed radius equations at NT
    L << 2 * c.g.re(1) * (*r0)[0] * (*r0)[0], 2 * c.g.re(2) * (*r0)[0] * (*r0)[1],
        2 * c.g.re(7) * (*r0)[0] * (*r0)[1], 2 * c.g.re(8) * (*r0)[1] * (*r0)[1];
    const Eigen::Matrix2d D = Eigen::Vector2d(-1.0 / c.c0, 1.0 / (c.cg - c.c0)).asDiagonal() * L;
    for (const auto& l : D.eigenvalues())
        if (std::abs(l.real()) < 1e-12) throw Degenerate("NT is not hyperbolic");

    const auto psi = slow_flow_wavenumbers((*r0)[0], (*r0)[1], c.g, c.omega_A, c.omega_B, c.c0, c.cg);
    Eigen::Vector4d z((*r0)[0], psi.psi_A, (*r0)[1], psi.psi_B);

    // Continue in eps from the eps = 0 solution.
    const int stages = eps == 0.0 ? 0 : 8;
    for (int s = 1; s <= stages; ++s) {
        const double e = eps * s / stages;
        for (int it = 0;; ++it) {
            const Eigen::Vector4d F = detail::nt_equations(z, e, c);
            if (!F.allFinite() || it >= 50)
                throw NewtonDiverged("constant-radius system at eps=" + std::to_string(e));
            const Eigen::Vector4d dz = detail::nt_jacobian(z, e, c).partialPivLu().solve(F);
            z -= dz;
            if (dz.cwiseAbs().maxCoeff() < 1e-12 * (1.0 + z.cwiseAbs().maxCoeff())) break;
        }
        if (!(z[0] > 0.0 && z[2] > 0.0)) throw NewtonDiverged("radius left the positive half-line");
    }
    return {z[0], z[2], z[1], z[3], eps, detail::nt_residual(z, eps, c)};
}

struct PersistenceOptions {
    double delta = 1e-4;
    double xi_max = 400.0;
    double escape = 3.0;       // in units of the semi-trivial radii
    int max_bisections = 60;
    double rtol = 1e-10;
    double atol = 1e-12;
};

struct FrontSample {
    double xi, Ar, Ai, Br, Bi, modA, modB;
};

struct PersistenceResult {
    bool pass = false;
    double tube_radius = std::numeric_limits<double>::infinity();
    double endpoint_distance = std::numeric_limits<double>::infinity();
    std::string omega_limit;
    std::vector<FrontSample> path;
    OrbitPath planar;  // eps = 0 orbit in rescaled radii
};

namespace detail {

struct FrontShot {
    std::vector<FrontSample> path;
    std::string label;       // reached structure or "escaped"/"xi_max"
    double min_target = std::numeric_limits<double>::infinity();
    std::size_t min_index = 0;
};

inline Eigen::Vector2d structure_radii(EqKind k, double eps, const FrontContext& c) {
    switch (k) {
        case EqKind::T: return {0.0, 0.0};
        case EqKind::ST_A: return {c.rA_scale(), 0.0};
        case EqKind::ST_B: return {0.0, c.rB_scale()};
        case EqKind::NT: {
            const auto o = nt_periodic_orbit(eps, c);
            return {o.rA, o.rB};
        }
    }
    return {0.0, 0.0};
}

inline FrontShot front_shot(const Eigen::Vector2d& seed, double eps, const FrontContext& c,
                            const std::vector<std::pair<EqKind, Eigen::Vector2d>>& structures,
                            EqKind source, EqKind target, double tol, const PersistenceOptions& o,
                            double dir = 1.0) {
    FrontShot shot;
    const double sA = c.rA_scale(), sB = c.rB_scale();
    Eigen::Vector4d Y(seed[0], 0.0, seed[1], 0.0);
    const Eigen::Vector4d X = critical_manifold_X(Y, c);
    const Eigen::Vector2d src = structures.at(std::size_t(source)).second;
    const Eigen::Vector2d tgt = structures.at(std::size_t(target)).second;
    bool left_source = false;

    auto record = [&](double xi, const Eigen::Vector4d& y) {
        const double mA = std::hypot(y[0], y[1]), mB = std::hypot(y[2], y[3]);
        shot.path.push_back({xi, y[0], y[1], y[2], y[3], mA, mB});
        const Eigen::Vector2d r(mA, mB);
        const double dt = (r - tgt).norm();
        if (dt < shot.min_target) {
            shot.min_target = dt;
            shot.min_index = shot.path.size() - 1;
        }
        if (dt < tol) {
            shot.label = to_string(target);
            return false;
        }
        if (mA > o.escape * sA || mB > o.escape * sB) {
            shot.label = "escaped";
            return false;
        }
        if (!left_source && (r - src).norm() > 10.0 * o.delta) left_source = true;
        for (const auto& [k, pos] : structures) {
            if (k == target || (k == source && !left_source)) continue;
            if ((r - pos).norm() < 1e-3 * std::max(sA, sB)) {
                shot.label = to_string(k);
                return false;
            }
        }
        return true;
    };
    record(0.0, Y);

    OdeOptions opt;
    opt.rtol = o.rtol;
    opt.atol = o.atol;
    if (eps > 0.0) {
        opt.h_max = 10.0 * eps * eps;
        opt.h_init = 1e-2 * eps * eps;
        Vec<8> y0;
        y0 << Y, X;
        auto f = [&](double, const Vec<8>& v) -> Vec<8> {
            return dir * fastslow_rhs(FastSlowState::unpack(v), eps, c).pack();
        };
        auto obs = [&](double t, const Vec<8>& v) { return record(t, v.head<4>()); };
        auto r = dopri5<8>(f, 0.0, y0, o.xi_max, opt, obs);
        if (!r.stopped) shot.label = "xi_max";
    } else {
        // On the critical manifold the dynamics is the slow flow itself.
        auto f = [&](double, const Vec<4>& y) -> Vec<4> { return dir * critical_manifold_X(y, c); };
        auto obs = [&](double t, const Vec<4>& y) { return record(t, y); };
        auto r = dopri5<4>(f, 0.0, Vec<4>(Y), o.xi_max, opt, obs);
        if (!r.stopped) shot.label = "xi_max";
    }
    return shot;
}

inline double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                                     const Eigen::Vector2d& b) {
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    const double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + s * ab)).norm();
}

inline double polyline_distance(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& poly) {
    double d = std::numeric_limits<double>::infinity();
    if (poly.size() == 1) return (p - poly[0]).norm();
    for (std::size_t i = 0; i + 1 < poly.size(); ++i)
        d = std::min(d, point_segment_distance(p, poly[i], poly[i + 1]));
    return d;
}

}  // namespace detail

// Symmetric Hausdorff distance between two polylines.
inline double hausdorff_distance(const std::vector<Eigen::Vector2d>& a,
                                 const std::vector<Eigen::Vector2d>& b) {
    double h = 0.0;
    for (const auto& p : a) h = std::max(h, detail::polyline_distance(p, b));
    for (const auto& p : b) h = std::max(h, detail::polyline_distance(p, a));
    return h;
}

// Maps a rescaled planar orbit to physical (|A|, |B|) coordinates.
inline std::vector<Eigen::Vector2d> planar_physical(const OrbitPath& p, const FrontContext& c) {
    std::vector<Eigen::Vector2d> out;
    out.reserve(p.samples.size());
    for (const auto& s : p.samples) out.emplace_back(s.rA * c.rA_scale(), s.rB * c.rB_scale());
    return out;
}

// Shoots the 8-dimensional front system from near the source structure and
// checks that it arrives near the target structure, following the planar
// heteroclinic.  Saddle targets are hit by bisecting the seed angle.  The
// planar orbit runs in the rescaled variable s with xi = (c0 / alpha_u) s, so
// the shot runs in the direction of increasing s, which must be the
// direction in which the critical manifold attracts.  Sample xi values are
// the physical xi, decreasing along the path when c0 < 0.
inline PersistenceResult integrate_persistence(double eps, EqKind source, EqKind target,
                                               const FrontContext& c, double tol,
                                               const PersistenceOptions& o = {}) {
    detail::require_speeds(c);
    PersistenceResult res;
    const RadiiParams rp = c.radii_params();
    res.planar = heteroclinic(rp, source, target, 1e-6);
    const auto planar = planar_physical(res.planar, c);

    const double dir = c.c0 > 0.0 ? 1.0 : -1.0;
    for (const auto& l : critical_manifold_eigs(c.c0, c.cg, c.cv).eigenvalues)
        if (!(dir * l.real() < 0.0))
            throw UnsupportedClass("critical manifold is not attracting in the direction of the planar orbit");

    std::vector<std::pair<EqKind, Eigen::Vector2d>> structures;
    for (EqKind k : {EqKind::T, EqKind::ST_A, EqKind::ST_B, EqKind::NT}) {
        if (k == EqKind::NT && !nt_position(rp)) {
            structures.emplace_back(k, Eigen::Vector2d(1e300, 1e300));
            continue;
        }
        structures.emplace_back(k, detail::structure_radii(k, eps, c));
    }
    const Eigen::Vector2d src = structures[std::size_t(source)].second;

    // Departure direction of the planar orbit at distance delta from the
    // source.  Seeds rotate it by a small angle w, which keeps full relative
    // precision in w when the separatrix hugs an axis.
    Eigen::Vector2d u0(1.0, 0.0);
    for (const auto& q : planar) {
        const Eigen::Vector2d d = q - planar.front();
        if (d.norm() >= o.delta) {
            u0 = d.normalized();
            break;
        }
    }
    auto seed_at = [&](double w) -> Eigen::Vector2d {
        const Eigen::Vector2d u(u0[0] * std::cos(w) - u0[1] * std::sin(w),
                                u0[0] * std::sin(w) + u0[1] * std::cos(w));
        return (src + o.delta * u).cwiseMax(0.0);
    };
    auto shoot = [&](double w) {
        return detail::front_shot(seed_at(w), eps, c, structures, source, target, tol, o, dir);
    };

    auto finish = [&](detail::FrontShot&& s) {
        res.omega_limit = s.label;
        res.endpoint_distance = s.min_target;
        res.pass = res.endpoint_distance < tol;
        s.path.resize(s.min_index + 1);
        for (auto& q : s.path) q.xi *= dir;
        res.path = std::move(s.path);

        std::vector<Eigen::Vector2d> proj;
        for (const auto& q : res.path) proj.emplace_back(q.modA, q.modB);
        res.tube_radius = 0.0;
        for (const auto& q : proj)
            res.tube_radius = std::max(res.tube_radius, detail::polyline_distance(q, planar));
        return res;
    };

    auto best = shoot(0.0);
    if (best.min_target < tol) return finish(std::move(best));

    // Bracket the angle with shots that end in different places.
    double lo = 0.0, hi = 0.0;
    detail::FrontShot shot_lo = best, shot_hi = best;
    bool bracketed = false;
    for (double w = 1e-3; w <= 1.6 && !bracketed; w *= 2.0) {
        for (double sgn : {-1.0, 1.0}) {
            auto s = shoot(sgn * w);
            if (s.min_target < best.min_target) best = s;
            if (s.label != shot_lo.label) {
                (sgn < 0 ? lo : hi) = sgn * w;
                (sgn < 0 ? shot_lo : shot_hi) = std::move(s);
                bracketed = true;
                break;
            }
        }
    }
    if (bracketed) {
        for (int it = 0; it < o.max_bisections && best.min_target >= tol; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            auto s = shoot(mid);
            if (s.min_target < best.min_target) best = s;
            if (s.label == shot_lo.label) {
                lo = mid;
                shot_lo = std::move(s);
            } else {
                hi = mid;
                shot_hi = std::move(s);
            }
        }
    }
    return finish(std::move(best));
}

}  // namespace thlab
