#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "ode.hpp"
#include "waves.hpp"

namespace thlab {

struct TorusState {
    cplx A{0.0, 0.0};
    cplx B{0.0, 0.0};  // B_o, the Turing-Hopf amplitude without its carrier
    double theta = 0.0;
};

// Higher-order remainder rho(A, B_o e^{i theta}) of the reduced system.
using Perturbation = std::function<cplx(cplx A, cplx B_theta)>;

struct ReducedSystem {
    double eps = 0.1;
    double alpha_u = 1.0, alpha_v = 1.0;
    cplx g1, g2, g7, g8;
    double c_d = 1.0;
    Perturbation rho_A, rho_B;  // empty means zero

    static ReducedSystem from(const AmplitudeCoefficients& g, double alpha_u, double alpha_v,
                              double c_d, double eps) {
        return {eps, alpha_u, alpha_v, g(1), g(2), g(7), g(8), c_d, {}, {}};
    }

    // The example with rho_A = B_o |A|^4 e^{i theta} and rho_B = A |A|^4.
    static ReducedSystem example(double eps) {
        ReducedSystem s{eps, 1.0, 1.0, -cplx(1, 5), cplx(1, 5), -cplx(2, -1), -1.0, 1.0, {}, {}};
        s.rho_A = [](cplx A, cplx Bt) { return Bt * std::pow(std::norm(A), 2); };
        s.rho_B = [](cplx A, cplx) { return A * std::pow(std::norm(A), 2); };
        return s;
    }

    AmplitudeCoefficients gammas() const {
        AmplitudeCoefficients g;
        g(1) = g1;
        g(2) = g2;
        g(7) = g7;
        g(8) = g8;
        return g;
    }

    cplx rhoA(cplx A, cplx Bt) const { return rho_A ? rho_A(A, Bt) : cplx(0.0); }
    cplx rhoB(cplx A, cplx Bt) const { return rho_B ? rho_B(A, Bt) : cplx(0.0); }
};

inline TorusState reduced_rhs(const TorusState& s, const ReducedSystem& sys) {
    const double e2 = sys.eps * sys.eps, e4 = e2 * e2;
    const double aa = std::norm(s.A), bb = std::norm(s.B);
    const cplx eth = std::exp(I * s.theta);
    const cplx Bt = s.B * eth;
    TorusState d;
    d.A = e2 * (sys.alpha_u * s.A + s.A * (sys.g1 * aa + sys.g2 * bb)) + e4 * sys.rhoA(s.A, Bt);
    d.B = e2 * (sys.alpha_v * s.B + s.B * (sys.g7 * aa + sys.g8 * bb)) +
          e4 * sys.rhoB(s.A, Bt) * std::conj(eth);
    d.theta = sys.c_d;
    return d;
}

struct AngleSample {
    double t, phi_A, phi_B, theta, modA, modB;
    bool section;  // taken on theta = 0 mod 2 pi
};

struct AngleTrace {
    std::vector<AngleSample> samples;

    std::vector<AngleSample> returns() const {
        std::vector<AngleSample> r;
        for (const auto& s : samples)
            if (s.section) r.push_back(s);
        return r;
    }
};

struct TorusOptions {
    double sample_dt = 0.0;  // extra uniform samples; 0 disables them
    double rtol = 1e-10;
    double atol = 1e-13;
};

namespace detail {

inline double wrap_2pi(double a) {
    const double tau = 2.0 * std::numbers::pi;
    a = std::fmod(a, tau);
    return a < 0.0 ? a + tau : a;
}

inline AngleSample angle_sample(double t, const Vec<5>& y, bool section) {
    const cplx A{y[0], y[1]}, B{y[2], y[3]};
    return {t, wrap_2pi(std::arg(A)), wrap_2pi(std::arg(B)), wrap_2pi(y[4]), std::abs(A), std::abs(B),
            section};
}

}  // namespace detail

// theta grows exactly linearly, so section times are known in advance and
// the integrator is made to land on each of them.
inline AngleTrace integrate_torus(const TorusState& ic, double T_end, const ReducedSystem& sys,
                                  const TorusOptions& o = {}) {
    if (!(T_end > 0.0)) throw Error("T_end must be positive");
    if (sys.c_d == 0.0) throw Error("c_d must be nonzero for a Poincare section");
    const double tau = 2.0 * std::numbers::pi;
    auto f = [&](double t, const Vec<5>& y) -> Vec<5> {
        // theta is integrated as a state too, but its exact value is used.
        TorusState s{{y[0], y[1]}, {y[2], y[3]}, ic.theta + sys.c_d * t};
        const TorusState d = reduced_rhs(s, sys);
        Vec<5> out;
        out << d.A.real(), d.A.imag(), d.B.real(), d.B.imag(), d.theta;
        return out;
    };

    // Section times t_k with theta(t_k) = 2 pi k.
    const double dir = sys.c_d > 0 ? 1.0 : -1.0;
    double k = dir > 0 ? std::ceil(ic.theta / tau) : std::floor(ic.theta / tau);
    auto section_time = [&](double kk) { return (kk * tau - ic.theta) / sys.c_d; };

    AngleTrace tr;
    Vec<5> y;
    y << ic.A.real(), ic.A.imag(), ic.B.real(), ic.B.imag(), ic.theta;
    double t = 0.0;
    tr.samples.push_back(detail::angle_sample(0.0, y, section_time(k) == 0.0));
    if (section_time(k) == 0.0) k += dir;
    double next_uniform = o.sample_dt > 0.0 ? o.sample_dt : std::numeric_limits<double>::infinity();

    OdeOptions opt;
    opt.rtol = o.rtol;
    opt.atol = o.atol;
    opt.h_init = 0.1;
    while (t < T_end) {
        const double ts = section_time(k);
        const double t1 = std::min({ts, next_uniform, T_end});
        const auto r = dopri5<5>(f, t, y, t1, opt);
        y = r.y;
        t = t1;
        opt.h_init = r.h;
        const double big = std::max(std::hypot(y[0], y[1]), std::hypot(y[2], y[3]));
        if (!std::isfinite(big) || big > 1e6) throw BlowUp("torus amplitude exceeded 1e6", t);
        const bool on_section = t1 == ts;
        if (on_section) k += dir;
        if (t1 == next_uniform) next_uniform += o.sample_dt;
        if (on_section || t1 == T_end || o.sample_dt > 0.0)
            tr.samples.push_back(detail::angle_sample(t, y, on_section));
    }
    return tr;
}

enum class TorusVerdict { periodic, quasiperiodic, undetermined };

inline std::string to_string(TorusVerdict v) {
    switch (v) {
        case TorusVerdict::periodic: return "periodic";
        case TorusVerdict::quasiperiodic: return "quasiperiodic";
        case TorusVerdict::undetermined: return "undetermined";
    }
    return "?";
}

struct TorusClassification {
    TorusVerdict verdict = TorusVerdict::undetermined;
    double rotation_estimate = 0.0;
    double min_return_distance = 0.0;
    int best_return = 0;
};

inline TorusClassification classify_torus(const AngleTrace& trace, double return_tol = 1e-3,
                                          int p_max = 200) {
    const auto ret = trace.returns();
    if (int(ret.size()) < p_max + 1)
        throw InsufficientReturns("need " + std::to_string(p_max + 1) + " section points, have " +
                                  std::to_string(ret.size()));
    const double tau = 2.0 * std::numbers::pi;
    auto circ = [&](double a, double b) {
        const double d = detail::wrap_2pi(a - b);
        return std::min(d, tau - d);
    };

    TorusClassification c;
    c.min_return_distance = std::numeric_limits<double>::infinity();
    for (int p = 1; p <= p_max; ++p) {
        const double d = circ(ret[p].phi_A, ret[0].phi_A);
        if (d < c.min_return_distance) {
            c.min_return_distance = d;
            c.best_return = p;
        }
    }

    // Unwrap phi_A along the returns to estimate the rotation number.
    double acc = 0.0;
    for (std::size_t i = 1; i < ret.size(); ++i) {
        double d = ret[i].phi_A - ret[i - 1].phi_A;
        d -= tau * std::round(d / tau);
        acc += d;
    }
    c.rotation_estimate = acc / (double(ret.size() - 1) * tau);

    std::vector<double> ph;
    ph.reserve(ret.size());
    for (const auto& r : ret) ph.push_back(r.phi_A);
    std::sort(ph.begin(), ph.end());
    double gap = tau - ph.back() + ph.front();
    for (std::size_t i = 1; i < ph.size(); ++i) gap = std::max(gap, ph[i] - ph[i - 1]);

    if (c.min_return_distance < return_tol)
        c.verdict = TorusVerdict::periodic;
    else if (c.min_return_distance > 10.0 * return_tol && gap <= tau / p_max)
        c.verdict = TorusVerdict::quasiperiodic;
    return c;
}

// Polar chart around the semi-trivial circle |A| = r_A*.  State order is
// (theta, phi_A, r_A, B_r, B_i).
struct PolarSTA {
    double theta, phi_A, r_A, B_r, B_i;
};

inline SpaceTimeWave semi_trivial_of(const ReducedSystem& sys) {
    return semi_trivial_wave(sys.alpha_u, sys.g1, 'A');
}

inline Eigen::Matrix2d polar_sta_LB(const ReducedSystem& sys) {
    const double r2 = std::pow(semi_trivial_of(sys).r_A, 2);
    Eigen::Matrix2d L;
    L << sys.alpha_v + sys.g7.real() * r2, -sys.g7.imag() * r2, sys.g7.imag() * r2,
        sys.alpha_v + sys.g7.real() * r2;
    return L;
}

inline PolarSTA polar_sta_rhs(const PolarSTA& s, double t, const ReducedSystem& sys) {
    const auto w = semi_trivial_of(sys);
    const double rs = w.r_A, R = rs + s.r_A;
    if (!(R > 0.0)) throw ChartSingular("r_A* + r_A must be positive");
    const double e2 = sys.eps * sys.eps, e4 = e2 * e2;
    const cplx E = std::exp(I * (w.omega_A * e2 * t + s.phi_A));
    const cplx B{s.B_r, s.B_i};
    const double bb = std::norm(B);
    const cplx eth = std::exp(I * s.theta);
    const cplx rA = std::conj(E) * sys.rhoA(R * E, B * eth);
    const cplx rB = std::conj(eth) * sys.rhoB(R * E, B * eth);
    const auto& g1 = sys.g1;
    const auto& g2 = sys.g2;
    const auto& g7 = sys.g7;
    const auto& g8 = sys.g8;
    PolarSTA d;
    d.theta = sys.c_d;
    d.r_A = e2 * (-2.0 * sys.alpha_u * s.r_A + g1.real() * (3.0 * rs * s.r_A * s.r_A + std::pow(s.r_A, 3)) +
                  g2.real() * R * bb) +
            e4 * rA.real();
    d.phi_A = e2 * (g1.imag() * (2.0 * rs * s.r_A + s.r_A * s.r_A) + g2.imag() * bb) + e4 * rA.imag() / R;
    d.B_r = e2 * (sys.alpha_v * s.B_r + R * R * (s.B_r * g7.real() - s.B_i * g7.imag()) +
                  bb * (s.B_r * g8.real() - s.B_i * g8.imag())) +
            e4 * rB.real();
    d.B_i = e2 * (sys.alpha_v * s.B_i + R * R * (s.B_i * g7.real() + s.B_r * g7.imag()) +
                  bb * (s.B_i * g8.real() + s.B_r * g8.imag())) +
            e4 * rB.imag();
    return d;
}

// Polar chart around the fully nontrivial torus.  State order is
// (r_A, r_B, phi_A, phi_B, theta).
struct PolarNT {
    double r_A, r_B, phi_A, phi_B, theta;
};

inline SpaceTimeWave nontrivial_of(const ReducedSystem& sys) {
    return nontrivial_wave(sys.alpha_u, sys.alpha_v, sys.gammas());
}

inline Eigen::Matrix2d polar_nt_L(const ReducedSystem& sys) {
    const auto w = nontrivial_of(sys);
    const double a = w.r_A, b = w.r_B;
    Eigen::Matrix2d L;
    L << sys.alpha_u + 3.0 * sys.g1.real() * a * a + sys.g2.real() * b * b, 2.0 * sys.g2.real() * a * b,
        2.0 * sys.g7.real() * a * b, sys.alpha_v + sys.g7.real() * a * a + 3.0 * sys.g8.real() * b * b;
    return L;
}

inline bool polar_nt_hyperbolic(const ReducedSystem& sys) {
    for (const auto& l : polar_nt_L(sys).eigenvalues())
        if (std::abs(l.real()) < 1e-12) return false;
    return true;
}

inline PolarNT polar_nt_rhs(const PolarNT& s, double t, const ReducedSystem& sys) {
    const auto w = nontrivial_of(sys);
    const double as = w.r_A, bs = w.r_B;
    const double RA = as + s.r_A, RB = bs + s.r_B;
    if (!(RA > 0.0 && RB > 0.0)) throw ChartSingular("both polar radii must be positive");
    const double e2 = sys.eps * sys.eps, e4 = e2 * e2;
    const cplx EA = std::exp(I * (w.omega_A * e2 * t + s.phi_A));
    const cplx EB = std::exp(I * (w.omega_B * e2 * t + s.phi_B));
    const cplx eth = std::exp(I * s.theta);
    const cplx A = RA * EA, Bt = RB * EB * eth;
    const cplx pA = std::conj(EA) * sys.rhoA(A, Bt);
    const cplx pB = std::conj(eth) * std::conj(EB) * sys.rhoB(A, Bt);
    const double g1r = sys.g1.real(), g2r = sys.g2.real(), g7r = sys.g7.real(), g8r = sys.g8.real();
    const double g1i = sys.g1.imag(), g2i = sys.g2.imag(), g7i = sys.g7.imag(), g8i = sys.g8.imag();
    const double a = s.r_A, b = s.r_B;
    PolarNT d;
    d.r_A = e2 * ((sys.alpha_u + 3.0 * g1r * as * as + g2r * bs * bs) * a + 2.0 * g2r * as * bs * b) +
            e2 * (g1r * (3.0 * as * a * a + a * a * a) + g2r * (2.0 * bs * a * b + as * b * b + a * b * b)) +
            e4 * pA.real();
    d.r_B = e2 * (2.0 * g7r * as * bs * a + (sys.alpha_v + g7r * as * as + 3.0 * g8r * bs * bs) * b) +
            e2 * (g7r * (bs * a * a + 2.0 * as * a * b + b * a * a) + g8r * (3.0 * bs * b * b + b * b * b)) +
            e4 * pB.real();
    d.phi_A = e2 * (g1i * (2.0 * as * a + a * a) + g2i * (2.0 * bs * b + b * b)) + e4 * pA.imag() / RA;
    d.phi_B = e2 * (g7i * (2.0 * as * a + a * a) + g8i * (2.0 * bs * b + b * b)) + e4 * pB.imag() / RB;
    d.theta = sys.c_d;
    return d;
}

}  // namespace thlab
