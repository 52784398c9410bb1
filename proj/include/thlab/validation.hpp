#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <thread>
#include <utility>
#include <vector>

#include "coefficients.hpp"
#include "model.hpp"
#include "spectral.hpp"

namespace thlab {

struct ScalingReport {
    std::vector<double> eps_values, errors;
    double slope = 0.0, intercept = 0.0;
};

// Least-squares line through (log eps, log err).
inline ScalingReport scaling_fit(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 3) throw DegenerateData("need at least three (eps, error) pairs");
    ScalingReport r;
    double sx = 0, sy = 0;
    for (const auto& [e, err] : pairs) {
        if (!(e > 0.0) || !(err > 0.0)) throw DegenerateData("eps and errors must be positive");
        r.eps_values.push_back(e);
        r.errors.push_back(err);
        sx += std::log(e);
        sy += std::log(err);
    }
    const double n = double(pairs.size()), mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (const auto& [e, err] : pairs) {
        sxx += (std::log(e) - mx) * (std::log(e) - mx);
        sxy += (std::log(e) - mx) * (std::log(err) - my);
    }
    if (!(sxx > 0.0)) throw DegenerateData("eps values must not all coincide");
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    return r;
}

// Builds amplitude initial data on the slow grid.
using AmplitudeIC = std::function<AmpFields(const Grid1D& slow)>;

inline AmplitudeIC constant_amplitudes(cplx A, cplx B) {
    return [A, B](const Grid1D& g) { return AmpFields{cvec(g.n, A), cvec(g.n, B)}; };
}

struct ApproximationSetup {
    ModelParams p;  // epsilon is overwritten per run
    NonlinearityCoeffs nl;
    AmplitudeIC ic = constant_amplitudes(0.0, 0.0);
    double T0 = 1.0;
    int snapshots = 50;
    int n_pde = 1024;
    int periods = 40;  // PDE box length in multiples of 2 pi
    int n_amp = 256;
    double dt_pde = 0.05;
    double dt_amp = 5e-4;
    bool well_prepared = true;  // add the eps^2 corrections to the PDE data
    Scheme scheme = Scheme::ETDRK4;
};

// Sup over snapshot times in [0, T0/eps^2] of the max-norm distance between
// the PDE solution and the leading-order ansatz built from the averaged
// amplitude system.
inline double approximation_error(double eps, const ApproximationSetup& s) {
    ModelParams p = s.p;
    p.epsilon = eps;
    const Grid1D fine{s.n_pde, 2.0 * std::numbers::pi * s.periods};
    const Grid1D slow{s.n_amp, eps * fine.length};
    const auto g = compute_gammas(s.nl, velocities(p).c_p);
    const auto corr = correction_amplitudes(s.nl, velocities(p).c_p);

    std::vector<double> T_snap, t_snap;
    for (int i = 0; i <= s.snapshots; ++i) {
        T_snap.push_back(s.T0 * i / s.snapshots);
        t_snap.push_back(T_snap.back() / (eps * eps));
    }
    const AmpFields ic = s.ic(slow);
    const auto amp = run_amplitude_averaged(ic, p, slow, g, SimConfig{s.dt_amp, s.T0, s.scheme, true}, T_snap);
    const RealFields u0 = reconstruct_ansatz(ic.A, ic.B, slow, 0.0, p, s.well_prepared ? &corr : nullptr, fine);
    const auto pde = run_pde(u0, p, s.nl, fine, SimConfig{s.dt_pde, t_snap.back(), s.scheme, true}, t_snap);

    double err = 0.0;
    for (std::size_t i = 0; i < t_snap.size(); ++i) {
        const RealFields psi = reconstruct_ansatz(amp[i].A, amp[i].B, slow, t_snap[i], p, nullptr, fine);
        for (int j = 0; j < fine.n; ++j)
            err = std::max({err, std::abs(pde[i].u[j] - psi.u[j]), std::abs(pde[i].v[j] - psi.v[j])});
    }
    return err;
}

// The semi-trivial Turing benchmark: constant A = r_A*, B = 0, with a
// damped Turing-Hopf mode so that B stays small.
inline ApproximationSetup semi_trivial_benchmark() {
    ApproximationSetup s;
    s.p = ModelParams{1.0, 1.0, -1.0, 0.1};
    s.nl.f20 = 0.5;
    s.nl.f11 = 0.3;
    s.nl.f02 = 0.2;
    s.nl.f30 = -1.0;
    s.nl.g20 = 0.4;
    s.nl.g11 = -0.3;
    s.nl.g02 = 0.1;
    s.nl.g03 = -1.0;
    const auto g = compute_gammas(s.nl, velocities(s.p).c_p);
    const double r = std::sqrt(-s.p.alpha_u / g.re(1));
    s.ic = constant_amplitudes(r, 0.0);
    return s;
}

struct AveragingSetup {
    ModelParams p;  // epsilon is overwritten per run
    AmplitudeCoefficients g;
    AmplitudeIC ic = constant_amplitudes(0.0, 0.0);
    Grid1D slow{64, 8.0 * std::numbers::pi};
    double T0 = 1.0;
    int snapshots = 50;
    double dt_factor = 1.0 / 20.0;  // dt = dt_factor * eps^2
    Scheme scheme = Scheme::ETDRK4;
};

// Sup over [0, T0] of the max-norm distance between the full and the
// averaged amplitude systems started from the same data.
inline double averaging_error(double eps, const AveragingSetup& s) {
    ModelParams p = s.p;
    p.epsilon = eps;
    std::vector<double> T;
    for (int i = 0; i <= s.snapshots; ++i) T.push_back(s.T0 * i / s.snapshots);
    const SimConfig cfg{s.dt_factor * eps * eps, s.T0, s.scheme, true};
    const AmpFields ic = s.ic(s.slow);
    const auto av = run_amplitude_averaged(ic, p, s.slow, s.g, cfg, T);
    const auto full = run_amplitude_full(ic, p, s.slow, s.g, cfg, T);
    double err = 0.0;
    for (std::size_t i = 0; i < T.size(); ++i)
        for (int j = 0; j < s.slow.n; ++j)
            err = std::max({err, std::abs(av[i].A[j] - full[i].A[j]), std::abs(av[i].B[j] - full[i].B[j])});
    return err;
}

// Generic coefficients with stable cubic parts and nonzero oscillatory terms.
inline AveragingSetup generic_averaging_benchmark() {
    AveragingSetup s;
    s.p = ModelParams{1.0, 1.0, 1.0, 0.1};
    auto& g = s.g;
    g(1) = {-1.0, 0.5};
    g(2) = {-0.5, 0.3};
    g(3) = {0.4, -0.2};
    g(4) = {0.3, 0.1};
    g(5) = {-0.2, 0.4};
    g(6) = {0.25, 0.25};
    g(7) = {-0.6, -0.2};
    g(8) = {-1.0, -0.4};
    g(9) = {0.3, 0.2};
    g(10) = {-0.4, 0.1};
    g(11) = {0.2, -0.3};
    g(12) = {0.35, 0.15};
    s.ic = [](const Grid1D& gr) {
        AmpFields f{cvec(gr.n), cvec(gr.n)};
        for (int j = 0; j < gr.n; ++j) {
            const double x = gr.x(j) * 2.0 * std::numbers::pi / gr.length;
            f.A[j] = cplx(0.8 + 0.2 * std::cos(x), 0.1 * std::sin(2.0 * x));
            f.B[j] = cplx(0.6 - 0.2 * std::sin(x), 0.15 * std::cos(x));
        }
        return f;
    };
    return s;
}

// Max norm of the PDE residual of Psi_GL + Psi_hot with constant amplitudes,
// restricted to the Fourier band |k| in [2/3, 4/3].
inline double critical_band_residual(double eps, const ModelParams& p0, const NonlinearityCoeffs& nl,
                                     cplx A, cplx B, double t, int n = 64) {
    ModelParams p = p0;
    p.epsilon = eps;
    const Grid1D g{n, 2.0 * std::numbers::pi};
    const Grid1D slow{n, eps * g.length};
    const auto corr = correction_amplitudes(nl, velocities(p).c_p);
    const cvec Ac(n, A), Bc(n, B);
    auto psi = [&](double tt) { return reconstruct_ansatz(Ac, Bc, slow, tt, p, &corr, g); };

    const double h = 1e-4;
    const RealFields f0 = psi(t), fp = psi(t + h), fm = psi(t - h);
    Fft fft(n);
    cvec uh(n), vh(n), fh(n), gh(n), tmp(n);
    for (int j = 0; j < n; ++j) tmp[j] = f0.u[j];
    fft.forward(tmp, uh);
    for (int j = 0; j < n; ++j) tmp[j] = f0.v[j];
    fft.forward(tmp, vh);
    cvec fx(n), gx(n);
    for (int j = 0; j < n; ++j) {
        const auto [f, gg] = eval_nonlinearity(f0.u[j], f0.v[j], nl);
        fx[j] = f;
        gx[j] = gg;
    }
    fft.forward(fx, fh);
    fft.forward(gx, gh);

    cvec ru(n), rv(n);
    const double e2 = eps * eps;
    for (int j = 0; j < n; ++j) {
        const double k = g.k(j), s = 1.0 - k * k, ko = g.k_odd(j);
        const bool band = std::abs(k) >= 2.0 / 3.0 && std::abs(k) <= 4.0 / 3.0;
        const cplx Lu = -s * s + e2 * p.alpha_u;
        const cplx Lv = cplx(-s * s + e2 * p.alpha_v, -p.c_d * ko * ko * ko);
        ru[j] = band ? Lu * uh[j] + fh[j] : 0.0;
        rv[j] = band ? Lv * vh[j] + gh[j] : 0.0;
    }
    cvec ru_x(n), rv_x(n);
    fft.inverse(ru, ru_x);
    fft.inverse(rv, rv_x);

    // Time derivatives by central differences, projected on the same band.
    cvec dut(n), dvt(n), dut_h(n), dvt_h(n);
    for (int j = 0; j < n; ++j) {
        dut[j] = (fp.u[j] - fm.u[j]) / (2.0 * h);
        dvt[j] = (fp.v[j] - fm.v[j]) / (2.0 * h);
    }
    fft.forward(dut, dut_h);
    fft.forward(dvt, dvt_h);
    for (int j = 0; j < n; ++j) {
        const double k = std::abs(g.k(j));
        if (k < 2.0 / 3.0 || k > 4.0 / 3.0) dut_h[j] = dvt_h[j] = 0.0;
    }
    fft.inverse(dut_h, dut);
    fft.inverse(dvt_h, dvt);

    double r = 0.0;
    for (int j = 0; j < n; ++j)
        r = std::max({r, std::abs(ru_x[j] - dut[j]), std::abs(rv_x[j] - dvt[j])});
    return r;
}

// Evaluates f over the given eps values on up to `workers` threads.
inline std::vector<double> sweep(const std::vector<double>& eps, const std::function<double(double)>& f,
                                 unsigned workers = 1) {
    std::vector<double> out(eps.size());
    std::vector<std::exception_ptr> errs(eps.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next++) < eps.size();) {
            try {
                out[i] = f(eps[i]);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    workers = std::max(1u, std::min<unsigned>(workers, unsigned(eps.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace thlab
