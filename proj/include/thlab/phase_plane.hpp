#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "coefficients.hpp"
#include "ode.hpp"

namespace thlab {

enum class EqKind { T, ST_A, ST_B, NT };
enum class Stability { stable, unstable, saddle, centre };

inline std::string to_string(EqKind k) {
    switch (k) {
        case EqKind::T: return "T";
        case EqKind::ST_A: return "ST_A";
        case EqKind::ST_B: return "ST_B";
        case EqKind::NT: return "NT";
    }
    return "?";
}

inline std::string to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::saddle: return "saddle";
        case Stability::centre: return "centre";
    }
    return "?";
}

inline std::optional<EqKind> eq_kind_from_string(const std::string& s) {
    for (EqKind k : {EqKind::T, EqKind::ST_A, EqKind::ST_B, EqKind::NT})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

struct Equilibrium {
    EqKind kind;
    Eigen::Vector2d position;
    std::array<cplx, 2> eigenvalues;
    Stability stability;
};

struct OrbitSample {
    double xi, rA, rB;
};

struct OrbitPath {
    std::vector<OrbitSample> samples;
    Equilibrium source;
    Equilibrium target;
    double endpoint_error = 0.0;
};

struct PredictedOrbit {
    EqKind source;
    EqKind target;
    bool family = false;  // a one-parameter family rather than a single orbit
    bool operator==(const PredictedOrbit&) const = default;
};

struct RegimeReport {
    int d_sign = 0;
    int c_sign = 0;
    bool NT_exists = false;
    std::optional<Stability> NT_class;
    std::optional<std::pair<double, double>> complex_window;
    std::optional<double> c_star;
    double det = 0.0, trace = 0.0;  // of the NT linearisation, when NT exists
    std::vector<PredictedOrbit> predicted_orbits;
};

namespace detail {
inline void require_c(const RadiiParams& rp) {
    if (rp.c_tilde == 0.0) throw ZeroCTilde("c_tilde must be nonzero");
}
inline int sign_of(double x) { return (x > 0.0) - (x < 0.0); }
}  // namespace detail

inline Eigen::Vector2d radii_rhs(const Eigen::Vector2d& r, const RadiiParams& rp) {
    detail::require_c(rp);
    const double a = r[0], b = r[1];
    return {-a + a * a * a - rp.gA_tilde * a * b * b,
            (b - b * b * b + rp.gB_tilde * b * a * a) / rp.c_tilde};
}

inline Eigen::Matrix2d radii_jacobian(const Eigen::Vector2d& r, const RadiiParams& rp) {
    detail::require_c(rp);
    const double a = r[0], b = r[1], c = rp.c_tilde;
    Eigen::Matrix2d J;
    J << -1.0 + 3.0 * a * a - rp.gA_tilde * b * b, -2.0 * rp.gA_tilde * a * b,
        2.0 * rp.gB_tilde * a * b / c, (1.0 - 3.0 * b * b + rp.gB_tilde * a * a) / c;
    return J;
}

// NT exists iff d != 0 and both squared radii are positive.
inline std::optional<Eigen::Vector2d> nt_position(const RadiiParams& rp) {
    const double d = 1.0 - rp.gA_tilde * rp.gB_tilde;
    if (d == 0.0) return std::nullopt;
    const double a2 = (1.0 + rp.gA_tilde) / d, b2 = (1.0 + rp.gB_tilde) / d;
    if (!(a2 > 0.0 && b2 > 0.0)) return std::nullopt;
    return Eigen::Vector2d(std::sqrt(a2), std::sqrt(b2));
}

inline double nt_determinant(const RadiiParams& rp) {
    return 4.0 * (1.0 + rp.gA_tilde) * (1.0 + rp.gB_tilde) /
           (-rp.c_tilde * (1.0 - rp.gA_tilde * rp.gB_tilde));
}

inline double nt_trace(const RadiiParams& rp) {
    return 2.0 * (1.0 + rp.gB_tilde - rp.c_tilde * (1.0 + rp.gA_tilde)) /
           (-rp.c_tilde * rp.d_tilde);
}

inline Stability stability_from(const std::array<cplx, 2>& ev, double scale = 1.0) {
    const double tol = 1e-12 * std::max(1.0, scale);
    const double a = ev[0].real(), b = ev[1].real();
    if (std::abs(a) <= tol && std::abs(b) <= tol) return Stability::centre;
    if (a < 0 && b < 0) return Stability::stable;
    if (a > 0 && b > 0) return Stability::unstable;
    return Stability::saddle;
}

// Stability of NT by the sign rules of the determinant/trace analysis.
inline Stability nt_stability(const RadiiParams& rp) {
    const double c = rp.c_tilde;
    if (rp.d_tilde < 0.0) {
        if (c < 0.0) return Stability::saddle;
        const double cs = (1.0 + rp.gB_tilde) / (1.0 + rp.gA_tilde);
        if (std::abs(c - cs) <= 1e-12 * std::max(1.0, std::abs(cs))) return Stability::centre;
        return c < cs ? Stability::stable : Stability::unstable;
    }
    return c < 0.0 ? Stability::unstable : Stability::saddle;
}

inline std::vector<Equilibrium> find_equilibria(const RadiiParams& rp) {
    detail::require_c(rp);
    const double c = rp.c_tilde;
    std::vector<Equilibrium> out;
    auto add = [&](EqKind k, Eigen::Vector2d pos, cplx l1, cplx l2) {
        std::array<cplx, 2> ev{l1, l2};
        out.push_back({k, pos, ev, stability_from(ev)});
    };
    add(EqKind::T, {0.0, 0.0}, -1.0, 1.0 / c);
    add(EqKind::ST_A, {1.0, 0.0}, 2.0, (1.0 + rp.gB_tilde) / c);
    add(EqKind::ST_B, {0.0, 1.0}, -1.0 - rp.gA_tilde, -2.0 / c);
    if (auto nt = nt_position(rp)) {
        const double det = nt_determinant(rp), tr = nt_trace(rp);
        const cplx disc = std::sqrt(cplx(tr * tr / 4.0 - det));
        std::array<cplx, 2> ev{tr / 2.0 + disc, tr / 2.0 - disc};
        out.push_back({EqKind::NT, *nt, ev, nt_stability(rp)});
    }
    return out;
}

inline std::optional<Equilibrium> find_equilibrium(const RadiiParams& rp, EqKind k) {
    for (const auto& e : find_equilibria(rp))
        if (e.kind == k) return e;
    return std::nullopt;
}

inline RegimeReport classify_NT(const RadiiParams& rp) {
    detail::require_c(rp);
    const auto nt = nt_position(rp);
    if (!nt) throw NTAbsent("NT does not exist for these parameters");
    RegimeReport rep;
    rep.d_sign = detail::sign_of(rp.d_tilde);
    rep.c_sign = detail::sign_of(rp.c_tilde);
    rep.NT_exists = true;
    rep.NT_class = nt_stability(rp);
    rep.det = nt_determinant(rp);
    rep.trace = nt_trace(rp);
    const double d = rp.d_tilde;
    if ((d - 1.0) * d >= 0.0) {
        const double ratio = (*nt)[1] * (*nt)[1] / ((*nt)[0] * (*nt)[0]);
        const double root = 2.0 * std::sqrt((d - 1.0) * d);
        rep.complex_window = std::pair{ratio * ((1.0 - 2.0 * d) - root), ratio * ((1.0 - 2.0 * d) + root)};
    }
    if (d < 0.0) rep.c_star = (1.0 + rp.gB_tilde) / (1.0 + rp.gA_tilde);
    return rep;
}

inline RegimeReport classify_regime(const RadiiParams& rp) {
    detail::require_c(rp);
    RegimeReport rep;
    if (nt_position(rp)) {
        rep = classify_NT(rp);
    } else {
        rep.d_sign = detail::sign_of(rp.d_tilde);
        rep.c_sign = detail::sign_of(rp.c_tilde);
    }
    using K = EqKind;
    auto& o = rep.predicted_orbits;
    const double c = rp.c_tilde, gA = rp.gA_tilde, gB = rp.gB_tilde;

    // Connections inside the invariant axes.
    o.push_back({K::ST_A, K::T});
    o.push_back(c > 0 ? PredictedOrbit{K::T, K::ST_B} : PredictedOrbit{K::ST_B, K::T});

    if (rep.NT_exists) {
        if (rp.d_tilde < 0 && c < 0) {
            o.push_back({K::ST_A, K::NT});
            o.push_back({K::ST_B, K::NT});
            o.push_back({K::NT, K::T});
        } else if (rp.d_tilde < 0 && c > 0) {
            // Only guaranteed for small c_tilde; NT is stable below c_star.
            if (rep.c_star && c < *rep.c_star) o.push_back({K::ST_B, K::NT});
        } else if (rp.d_tilde > 0 && c > 0) {
            o.push_back({K::ST_A, K::NT});
            o.push_back({K::NT, K::ST_B});
            o.push_back({K::ST_A, K::ST_B, true});
        } else if (rp.d_tilde > 0 && c < 0) {
            // Proven for gA*gB > 0 and seen numerically otherwise.
            o.push_back({K::NT, K::ST_A});
            o.push_back({K::NT, K::ST_B});
            o.push_back({K::NT, K::T, true});
        }
    } else if (c < 0) {
        if (gA < -1 && gB > -1) {
            o.push_back({K::ST_B, K::ST_A});
            o.push_back({K::ST_B, K::T, true});
        } else if (gA > -1 && gB < -1) {
            o.push_back({K::ST_A, K::ST_B});
            o.push_back({K::ST_A, K::T, true});
        }
    } else if (gA > -1 && gB > -1 && rp.d_tilde < 0) {
        o.push_back({K::ST_A, K::ST_B, true});
    }
    return rep;
}

struct WaveNumbers {
    double psi_A, psi_B;
};

inline WaveNumbers slow_flow_wavenumbers(double rA, double rB, const AmplitudeCoefficients& g,
                                         double omega_A, double omega_B, double c0, double cg) {
    if (c0 == 0.0 || cg - c0 == 0.0) throw ZeroSpeed("need c_0 != 0 and c_g != c_0");
    const double a2 = rA * rA, b2 = rB * rB;
    return {(omega_A - g.im(1) * a2 - g.im(2) * b2) / c0,
            (-omega_B + g.im(7) * a2 + g.im(8) * b2) / (cg - c0)};
}

struct ShootingOptions {
    double delta = 1e-6;
    double xi_max = 500.0;
    double box_lo = -0.1;
    double box_hi = 3.0;
    int fan_size = 32;
    OdeOptions ode{};
};

struct ShotOutcome {
    std::vector<OrbitSample> samples;
    std::optional<EqKind> limit;  // equilibrium reached, if any
    std::string reason;           // "converged", "escaped", "xi_max"
};

namespace detail {

inline ShotOutcome shoot(const RadiiParams& rp, const std::vector<Equilibrium>& eqs,
                         const Eigen::Vector2d& seed, double dir, double tol,
                         const ShootingOptions& so) {
    ShotOutcome res;
    auto f = [&](double, const Vec<2>& y) -> Vec<2> { return dir * radii_rhs(y, rp); };
    res.samples.push_back({0.0, seed[0], seed[1]});
    // The equilibrium the shot starts next to only counts once the orbit has left it.
    const Equilibrium* home = nullptr;
    for (const auto& e : eqs)
        if ((seed - e.position).norm() < tol) home = &e;
    auto obs = [&](double t, const Vec<2>& y) {
        if (home && (y - home->position).norm() > 2.0 * tol) home = nullptr;
        res.samples.push_back({t, y[0], y[1]});
        if (y[0] < so.box_lo || y[0] > so.box_hi || y[1] < so.box_lo || y[1] > so.box_hi) {
            res.reason = "escaped";
            return false;
        }
        const double speed = radii_rhs(y, rp).norm();
        for (const auto& e : eqs) {
            if (&e != home && (y - e.position).norm() < tol && speed < tol) {
                res.limit = e.kind;
                res.reason = "converged";
                return false;
            }
        }
        return true;
    };
    auto r = dopri5<2>(f, 0.0, seed, so.xi_max, so.ode, obs);
    if (!r.stopped) res.reason = "xi_max";
    return res;
}

inline std::string describe(const ShotOutcome& s) {
    return s.limit ? to_string(*s.limit) : s.reason;
}

inline int count_real_sign(const Equilibrium& e, int sgn) {
    int c = 0;
    for (const auto& l : e.eigenvalues) c += sign_of(l.real()) == sgn;
    return c;
}

inline Eigen::Vector2d eigvec_for(const Equilibrium& e, const RadiiParams& rp, int sgn) {
    Eigen::EigenSolver<Eigen::Matrix2d> es(radii_jacobian(e.position, rp));
    for (int i = 0; i < 2; ++i) {
        if (sign_of(es.eigenvalues()[i].real()) == sgn && std::abs(es.eigenvalues()[i].imag()) == 0.0) {
            Eigen::Vector2d v = es.eigenvectors().col(i).real();
            return v.normalized();
        }
    }
    throw Error("no real eigenvector with the requested sign at " + to_string(e.kind));
}

// Seeds source + delta * (+/- v) that stay in the closed positive quadrant.
inline std::vector<Eigen::Vector2d> quadrant_seeds(const Eigen::Vector2d& p, const Eigen::Vector2d& v,
                                                   double delta) {
    std::vector<Eigen::Vector2d> out;
    for (double o : {1.0, -1.0}) {
        Eigen::Vector2d s = p + o * delta * v;
        if (s[0] >= -1e-15 && s[1] >= -1e-15) out.push_back(s.cwiseMax(0.0));
    }
    return out;
}

inline OrbitPath make_path(std::vector<OrbitSample> samples, const Equilibrium& src,
                           const Equilibrium& tgt, bool reversed) {
    if (reversed) {
        std::reverse(samples.begin(), samples.end());
        const double x0 = samples.front().xi;
        for (auto& s : samples) s.xi = x0 - s.xi;
    }
    OrbitPath p{std::move(samples), src, tgt, 0.0};
    const auto& last = p.samples.back();
    p.endpoint_error = (Eigen::Vector2d(last.rA, last.rB) - tgt.position).norm();
    return p;
}

}  // namespace detail

struct FanShot {
    double angle;
    ShotOutcome outcome;
};

// Shoots a fan of directions on the delta-circle around a source whose
// unstable manifold is two-dimensional.
inline std::vector<FanShot> heteroclinic_fan(const RadiiParams& rp, EqKind source, double tol,
                                             const ShootingOptions& so = {}) {
    const auto eqs = find_equilibria(rp);
    const auto src = find_equilibrium(rp, source);
    if (!src) throw NTAbsent("source equilibrium absent");
    std::vector<FanShot> out;
    const int m = so.fan_size;
    for (int j = 0; j < m; ++j) {
        // Cover the full circle and keep the directions pointing into the quadrant.
        const double ang = 2.0 * std::numbers::pi * (j + 0.5) / m;
        Eigen::Vector2d seed = src->position + so.delta * Eigen::Vector2d(std::cos(ang), std::sin(ang));
        if (seed[0] < 0.0 || seed[1] < 0.0) continue;
        out.push_back({ang, detail::shoot(rp, eqs, seed, 1.0, tol, so)});
    }
    return out;
}

inline OrbitPath heteroclinic(const RadiiParams& rp, EqKind source, EqKind target, double tol,
                              const ShootingOptions& so = {}) {
    detail::require_c(rp);
    if (source == target) throw Error("source and target must differ");
    const auto eqs = find_equilibria(rp);
    const auto src = find_equilibrium(rp, source);
    const auto tgt = find_equilibrium(rp, target);
    if (!src || !tgt) throw NTAbsent("requested equilibrium does not exist");
    if (src->stability == Stability::centre || tgt->stability == Stability::centre)
        throw UnsupportedClass("centre equilibrium (heteroclinic cycle case)");

    std::string seen;
    auto forward = [&](const std::vector<Eigen::Vector2d>& seeds) -> std::optional<OrbitPath> {
        for (const auto& s : seeds) {
            auto shot = detail::shoot(rp, eqs, s, 1.0, tol, so);
            if (shot.limit == target) return detail::make_path(std::move(shot.samples), *src, *tgt, false);
            seen += (seen.empty() ? "" : ",") + detail::describe(shot);
        }
        return std::nullopt;
    };

    const Eigen::Vector2d& ps = src->position;
    const Eigen::Vector2d& pt = tgt->position;
    const bool on_A_axis = ps[1] == 0.0 && pt[1] == 0.0;
    const bool on_B_axis = ps[0] == 0.0 && pt[0] == 0.0;
    if (on_A_axis || on_B_axis) {
        // Connection inside an invariant axis: shoot along that axis.
        Eigen::Vector2d d = (pt - ps).normalized();
        const Eigen::Vector2d Jd = radii_jacobian(ps, rp) * d;
        if (!(Jd.dot(d) > 0.0)) throw NoConnection("source not unstable along the axis", "none");
        if (auto p = forward({ps + so.delta * d})) return *p;
        throw NoConnection("axis shot missed the target", seen);
    }

    const int nu = detail::count_real_sign(*src, 1);
    const int ns = detail::count_real_sign(*tgt, -1);
    if (nu == 0) throw NoConnection("source has no unstable direction", "none");
    if (ns == 0) throw NoConnection("target has no stable direction", "none");
    if (nu == 1 && ns == 1)
        throw UnsupportedClass("saddle-to-saddle connection off the invariant axes");

    if (nu == 1) {
        const Eigen::Vector2d v = detail::eigvec_for(*src, rp, 1);
        if (auto p = forward(detail::quadrant_seeds(ps, v, so.delta))) return *p;
        throw NoConnection("unstable manifold misses the target", seen);
    }
    if (ns == 1) {
        // Shoot backwards out of the target's one-dimensional stable manifold.
        const Eigen::Vector2d v = detail::eigvec_for(*tgt, rp, -1);
        const double d_rev = std::min(so.delta, tol) / 10.0;
        for (const auto& s : detail::quadrant_seeds(pt, v, d_rev)) {
            auto shot = detail::shoot(rp, eqs, s, -1.0, tol, so);
            if (shot.limit == source) return detail::make_path(std::move(shot.samples), *src, *tgt, true);
            seen += (seen.empty() ? "" : ",") + detail::describe(shot);
        }
        throw NoConnection("stable manifold of the target does not emanate from the source", seen);
    }
    for (auto& fs : heteroclinic_fan(rp, source, tol, so)) {
        if (fs.outcome.limit == target)
            return detail::make_path(std::move(fs.outcome.samples), *src, *tgt, false);
        seen += (seen.empty() ? "" : ",") + detail::describe(fs.outcome);
    }
    throw NoConnection("no fan direction reached the target", seen);
}

// Short forward trajectories from a regular grid, for phase portraits.
inline std::vector<std::vector<OrbitSample>> phase_portrait(const RadiiParams& rp, int per_axis,
                                                            double extent, double xi_len) {
    std::vector<std::vector<OrbitSample>> out;
    OdeOptions o;
    o.rtol = 1e-8;
    for (int i = 0; i < per_axis; ++i) {
        for (int j = 0; j < per_axis; ++j) {
            Vec<2> y0((i + 0.5) * extent / per_axis, (j + 0.5) * extent / per_axis);
            std::vector<OrbitSample> tr{{0.0, y0[0], y0[1]}};
            auto f = [&](double, const Vec<2>& y) -> Vec<2> { return radii_rhs(y, rp); };
            auto obs = [&](double t, const Vec<2>& y) {
                tr.push_back({t, y[0], y[1]});
                return y.norm() < 4.0 * extent;
            };
            dopri5<2>(f, 0.0, y0, xi_len, o, obs);
            out.push_back(std::move(tr));
        }
    }
    return out;
}

}  // namespace thlab
