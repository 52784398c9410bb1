#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "coefficients.hpp"
#include "model.hpp"

namespace thlab {

using cvec = std::vector<cplx>;
using rvec = std::vector<double>;

struct Grid1D {
    int n = 256;
    double length = 2.0 * std::numbers::pi;

    void validate() const {
        if (n < 16 || (n & (n - 1)) != 0)
            throw InvalidGrid("n must be a power of two and at least 16, got " + std::to_string(n));
        if (!(length > 0.0)) throw InvalidGrid("length must be positive");
    }

    // PDE boxes must hold an integer number of critical wavelengths.
    void validate_pde() const {
        validate();
        const double m = length / (2.0 * std::numbers::pi);
        if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, m))
            throw InvalidGrid("PDE length must be an integer multiple of 2*pi");
    }

    double dx() const { return length / n; }
    double x(int j) const { return j * dx(); }
    int signed_index(int j) const { return j < n / 2 ? j : j - n; }
    double k(int j) const { return 2.0 * std::numbers::pi * signed_index(j) / length; }
    // Odd-order symbols are zeroed at the Nyquist mode to keep real fields real.
    double k_odd(int j) const { return j == n / 2 ? 0.0 : k(j); }
    bool keep_dealiased(int j) const { return 3 * std::abs(signed_index(j)) < n && j != n / 2; }
};

// Thin RAII wrapper around a pair of FFTW plans on private buffers.
// Planning is serialised because the FFTW planner is not thread-safe.
class Fft {
public:
    explicit Fft(int n) : n_(n) {
        std::lock_guard lock(planner_mutex());
        in_ = fftw_alloc_complex(n);
        out_ = fftw_alloc_complex(n);
        fwd_ = fftw_plan_dft_1d(n, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(n, in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    ~Fft() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(in_);
        fftw_free(out_);
    }

    int size() const { return n_; }

    void forward(const cplx* in, cplx* out) { run(fwd_, in, out, 1.0); }
    void inverse(const cplx* in, cplx* out) { run(bwd_, in, out, 1.0 / n_); }
    void forward(const cvec& in, cvec& out) { out.resize(n_); forward(in.data(), out.data()); }
    void inverse(const cvec& in, cvec& out) { out.resize(n_); inverse(in.data(), out.data()); }

private:
    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }

    void run(fftw_plan p, const cplx* in, cplx* out, double scale) {
        auto* buf = reinterpret_cast<cplx*>(in_);
        std::copy(in, in + n_, buf);
        fftw_execute(p);
        const auto* res = reinterpret_cast<const cplx*>(out_);
        for (int j = 0; j < n_; ++j) out[j] = res[j] * scale;
    }

    int n_;
    fftw_complex* in_;
    fftw_complex* out_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

enum class Scheme { ETDRK4, IMEX2 };

struct SimConfig {
    double dt = 0.05;
    double t_end = 1.0;
    Scheme scheme = Scheme::ETDRK4;
    bool dealias = true;

    void validate() const {
        if (!(dt > 0.0)) throw Error("dt must be positive");
        if (!(t_end >= 0.0)) throw Error("t_end must be non-negative");
    }
};

struct RealFields {
    rvec u, v;
};

struct AmpFields {
    cvec A, B;
};

// Fixed-step integrator for  w' = L w + N(t, w)  with diagonal L.
// ETDRK4 uses the contour-integral phi functions; IMEX2 is
// Crank-Nicolson on L with variable-step Adams-Bashforth 2 on N.
class DiagonalStepper {
public:
    using Nonlinear = std::function<void(double, const cvec&, cvec&)>;

    DiagonalStepper(cvec L, Scheme scheme) : L_(std::move(L)), scheme_(scheme) {}

    // Advances w from t0 through each snapshot time, calling on_snapshot(i, t, w).
    template <class Snap>
    void run(cvec& w, double t0, double dt, const std::vector<double>& snaps, const Nonlinear& N,
             Snap&& on_snapshot) {
        double t = t0;
        prev_N_.clear();
        for (std::size_t i = 0; i < snaps.size(); ++i) {
            const double ts = snaps[i];
            while (ts - t > 1e-9 * dt) {
                const double h = std::min(dt, ts - t);
                step(w, t, (dt - h) < 1e-9 * dt ? dt : h, N);
                t = (ts - (t + h)) < 1e-9 * dt ? ts : t + h;
            }
            on_snapshot(i, t, w);
        }
    }

    void step(cvec& w, double t, double h, const Nonlinear& N) {
        if (scheme_ == Scheme::ETDRK4)
            etdrk4(w, t, h, N);
        else
            imex2(w, t, h, N);
    }

private:
    struct EtdCoeffs {
        cvec E, E2, Q, f1, f2, f3;
    };

    const EtdCoeffs& coeffs(double h) {
        auto it = cache_.find(h);
        if (it != cache_.end()) return it->second;
        constexpr int M = 64;
        const std::size_t m = L_.size();
        EtdCoeffs c;
        for (auto* v : {&c.E, &c.E2, &c.Q, &c.f1, &c.f2, &c.f3}) v->assign(m, 0.0);
        cvec roots(M);
        for (int j = 0; j < M; ++j) roots[j] = std::exp(I * (2.0 * std::numbers::pi * (j + 0.5) / M));
        for (std::size_t i = 0; i < m; ++i) {
            const cplx z = h * L_[i];
            c.E[i] = std::exp(z);
            c.E2[i] = std::exp(z / 2.0);
            cplx q = 0, a = 0, b = 0, d = 0;
            for (int j = 0; j < M; ++j) {
                const cplx r = z + roots[j];
                const cplx er = std::exp(r), r3 = r * r * r;
                q += (std::exp(r / 2.0) - 1.0) / r;
                a += (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3;
                b += (2.0 + r + er * (r - 2.0)) / r3;
                d += (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3;
            }
            c.Q[i] = h * q / double(M);
            c.f1[i] = h * a / double(M);
            c.f2[i] = h * b / double(M);
            c.f3[i] = h * d / double(M);
        }
        return cache_.emplace(h, std::move(c)).first->second;
    }

    void etdrk4(cvec& w, double t, double h, const Nonlinear& N) {
        const EtdCoeffs& c = coeffs(h);
        const std::size_t m = w.size();
        N(t, w, Nw_);
        a_.resize(m);
        for (std::size_t i = 0; i < m; ++i) a_[i] = c.E2[i] * w[i] + c.Q[i] * Nw_[i];
        N(t + h / 2, a_, Na_);
        b_.resize(m);
        for (std::size_t i = 0; i < m; ++i) b_[i] = c.E2[i] * w[i] + c.Q[i] * Na_[i];
        N(t + h / 2, b_, Nb_);
        c_.resize(m);
        for (std::size_t i = 0; i < m; ++i) c_[i] = c.E2[i] * a_[i] + c.Q[i] * (2.0 * Nb_[i] - Nw_[i]);
        N(t + h, c_, Nc_);
        for (std::size_t i = 0; i < m; ++i)
            w[i] = c.E[i] * w[i] + c.f1[i] * Nw_[i] + 2.0 * c.f2[i] * (Na_[i] + Nb_[i]) +
                   c.f3[i] * Nc_[i];
    }

    void imex2(cvec& w, double t, double h, const Nonlinear& N) {
        const std::size_t m = w.size();
        N(t, w, Nw_);
        if (prev_N_.empty()) {
            // First step: IMEX Euler keeps the global order at two.
            for (std::size_t i = 0; i < m; ++i) w[i] = (w[i] + h * Nw_[i]) / (1.0 - h * L_[i]);
        } else {
            const double r = h / (2.0 * prev_h_);
            for (std::size_t i = 0; i < m; ++i) {
                const cplx ext = (1.0 + r) * Nw_[i] - r * prev_N_[i];
                w[i] = ((1.0 + 0.5 * h * L_[i]) * w[i] + h * ext) / (1.0 - 0.5 * h * L_[i]);
            }
        }
        prev_N_ = Nw_;
        prev_h_ = h;
    }

    cvec L_;
    Scheme scheme_;
    std::map<double, EtdCoeffs> cache_;
    cvec Nw_, Na_, Nb_, Nc_, a_, b_, c_, prev_N_;
    double prev_h_ = 0.0;
};

namespace detail {

inline void check_snapshots(const std::vector<double>& snaps, const SimConfig& cfg) {
    cfg.validate();
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        if (snaps[i] < 0.0 || snaps[i] > cfg.t_end * (1.0 + 1e-12) + 1e-300)
            throw Error("snapshot time outside [0, t_end]");
        if (i > 0 && snaps[i] < snaps[i - 1]) throw Error("snapshot times must be sorted");
    }
}

inline double max_abs(const rvec& a) {
    double m = 0.0;
    for (double x : a) {
        if (!std::isfinite(x)) return INFINITY;
        m = std::max(m, std::abs(x));
    }
    return m;
}

inline double max_abs(const cvec& a) {
    double m = 0.0;
    for (const cplx& x : a) {
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return INFINITY;
        m = std::max(m, std::abs(x));
    }
    return m;
}

inline constexpr double kBlowUp = 1e6;

}  // namespace detail

inline std::vector<RealFields> run_pde(const RealFields& ic, const ModelParams& p,
                                       const NonlinearityCoeffs& nl, const Grid1D& g,
                                       const SimConfig& cfg, const std::vector<double>& snaps) {
    g.validate_pde();
    p.validate();
    detail::check_snapshots(snaps, cfg);
    const int n = g.n;
    if (int(ic.u.size()) != n || int(ic.v.size()) != n) throw GridMismatch("initial data size");

    const double e2 = p.epsilon * p.epsilon;
    cvec L(2 * n);
    for (int j = 0; j < n; ++j) {
        const double k = g.k(j), s = 1.0 - k * k, ko = g.k_odd(j);
        L[j] = -s * s + e2 * p.alpha_u;
        L[n + j] = cplx(-s * s + e2 * p.alpha_v, -p.c_d * ko * ko * ko);
    }

    Fft fft(n);
    cvec tmp(n), uh(n), vh(n), fh(n), gh(n), fx(n), gx(n);
    rvec u(n), v(n);
    auto to_physical = [&](const cvec& w, rvec& out, int off) {
        fft.inverse(w.data() + off, tmp.data());
        for (int j = 0; j < n; ++j) out[j] = tmp[j].real();
    };

    DiagonalStepper::Nonlinear N = [&](double t, const cvec& w, cvec& out) {
        to_physical(w, u, 0);
        to_physical(w, v, n);
        if (std::max(detail::max_abs(u), detail::max_abs(v)) > detail::kBlowUp)
            throw BlowUp("PDE field exceeded 1e6", t);
        for (int j = 0; j < n; ++j) {
            const auto [f, gg] = eval_nonlinearity(u[j], v[j], nl);
            fx[j] = f;
            gx[j] = gg;
        }
        fft.forward(fx.data(), fh.data());
        fft.forward(gx.data(), gh.data());
        out.resize(2 * n);
        for (int j = 0; j < n; ++j) {
            const bool keep = cfg.dealias ? g.keep_dealiased(j) : j != n / 2;
            out[j] = keep ? fh[j] : 0.0;
            out[n + j] = keep ? gh[j] : 0.0;
        }
    };

    cvec w(2 * n);
    for (int j = 0; j < n; ++j) {
        fx[j] = ic.u[j];
        gx[j] = ic.v[j];
    }
    fft.forward(fx.data(), w.data());
    fft.forward(gx.data(), w.data() + n);

    std::vector<RealFields> out(snaps.size());
    DiagonalStepper stepper(L, cfg.scheme);
    stepper.run(w, 0.0, cfg.dt, snaps, N, [&](std::size_t i, double t, const cvec& state) {
        RealFields rf{rvec(n), rvec(n)};
        double imag = 0.0;
        for (int f = 0; f < 2; ++f) {
            fft.inverse(state.data() + f * n, tmp.data());
            rvec& dst = f == 0 ? rf.u : rf.v;
            for (int j = 0; j < n; ++j) {
                dst[j] = tmp[j].real();
                imag = std::max(imag, std::abs(tmp[j].imag()));
            }
        }
        if (imag > 1e-9) throw NonRealField("imaginary part " + std::to_string(imag));
        if (std::max(detail::max_abs(rf.u), detail::max_abs(rf.v)) > detail::kBlowUp)
            throw BlowUp("PDE field exceeded 1e6", t);
        out[i] = std::move(rf);
    });
    return out;
}

namespace detail {

// Shared driver for the averaged and full amplitude systems.  The B
// equation carries the singular advection -(c_g/eps) d_X inside L.
inline std::vector<AmpFields> run_amplitude(const AmpFields& ic, const ModelParams& p,
                                            const Grid1D& g, const AmplitudeCoefficients& gam,
                                            const SimConfig& cfg,
                                            const std::vector<double>& snaps, bool oscillatory) {
    g.validate();
    p.validate();
    check_snapshots(snaps, cfg);
    const int n = g.n;
    if (int(ic.A.size()) != n || int(ic.B.size()) != n) throw GridMismatch("initial data size");
    const auto [cp, cg] = velocities(p);
    const double eps = p.epsilon;

    cvec L(2 * n);
    for (int j = 0; j < n; ++j) {
        const double K = g.k(j);
        L[j] = -4.0 * K * K + p.alpha_u;
        L[n + j] = -(4.0 + 3.0 * I * p.c_d) * K * K - I * (cg / eps) * K + p.alpha_v;
    }

    Fft fft(n);
    cvec A(n), B(n), nA(n), nB(n);
    DiagonalStepper::Nonlinear N = [&](double t, const cvec& w, cvec& out) {
        fft.inverse(w.data(), A.data());
        fft.inverse(w.data() + n, B.data());
        if (std::max(max_abs(A), max_abs(B)) > kBlowUp) throw BlowUp("amplitude exceeded 1e6", t);
        const cplx e1 = oscillatory ? std::exp(I * (cp * t / (eps * eps))) : cplx(0.0);
        const cplx e2 = e1 * e1, em1 = std::conj(e1), em2 = std::conj(e2);
        for (int j = 0; j < n; ++j) {
            const cplx a = A[j], b = B[j];
            const double aa = std::norm(a), bb = std::norm(b);
            cplx fa = gam(1) * a * aa + gam(2) * a * bb;
            cplx fb = gam(7) * b * aa + gam(8) * b * bb;
            if (oscillatory) {
                fa += gam(3) * a * a * std::conj(b) * e1 + (gam(4) * b * aa + gam(5) * b * bb) * em1 +
                      gam(6) * b * b * std::conj(a) * em2;
                fb += (gam(9) * a * aa + gam(10) * a * bb) * e1 + gam(11) * a * a * std::conj(b) * e2 +
                      gam(12) * b * b * std::conj(a) * em1;
            }
            nA[j] = fa;
            nB[j] = fb;
        }
        out.resize(2 * n);
        fft.forward(nA.data(), out.data());
        fft.forward(nB.data(), out.data() + n);
        for (int j = 0; j < n; ++j) {
            if (cfg.dealias ? !g.keep_dealiased(j) : false) out[j] = out[n + j] = 0.0;
        }
    };

    cvec w(2 * n);
    fft.forward(ic.A.data(), w.data());
    fft.forward(ic.B.data(), w.data() + n);
    std::vector<AmpFields> out(snaps.size());
    DiagonalStepper stepper(L, cfg.scheme);
    stepper.run(w, 0.0, cfg.dt, snaps, N, [&](std::size_t i, double t, const cvec& state) {
        AmpFields af{cvec(n), cvec(n)};
        fft.inverse(state.data(), af.A.data());
        fft.inverse(state.data() + n, af.B.data());
        if (std::max(max_abs(af.A), max_abs(af.B)) > kBlowUp) throw BlowUp("amplitude exceeded 1e6", t);
        out[i] = std::move(af);
    });
    return out;
}

}  // namespace detail

inline std::vector<AmpFields> run_amplitude_averaged(const AmpFields& ic, const ModelParams& p,
                                                     const Grid1D& g,
                                                     const AmplitudeCoefficients& gam,
                                                     const SimConfig& cfg,
                                                     const std::vector<double>& snaps) {
    return detail::run_amplitude(ic, p, g, gam, cfg, snaps, false);
}

inline std::vector<AmpFields> run_amplitude_full(const AmpFields& ic, const ModelParams& p,
                                                 const Grid1D& g, const AmplitudeCoefficients& gam,
                                                 const SimConfig& cfg,
                                                 const std::vector<double>& snaps) {
    return detail::run_amplitude(ic, p, g, gam, cfg, snaps, true);
}

// Samples a periodic field given on `from` at the points of `to` by
// zero-padding or truncating its spectrum.  Both grids cover one period.
inline cvec spectral_resample(const cvec& f, int n_to) {
    const int n = int(f.size());
    if (n == n_to) return f;
    Fft src(n), dst(n_to);
    cvec fh(n), gh(n_to, 0.0), out(n_to);
    src.forward(f, fh);
    const int half = std::min(n, n_to) / 2;
    for (int j = 0; j < half; ++j) {
        gh[j] = fh[j];
        gh[n_to - 1 - j] = fh[n - 1 - j];
    }
    if (n < n_to) {
        // Split the source Nyquist coefficient symmetrically.
        const cplx ny = fh[n / 2];
        gh[n / 2] = 0.5 * ny;
        gh[n_to - n / 2] = 0.5 * ny;
    } else {
        gh[n_to / 2] = 0.5 * (fh[n_to / 2] + fh[n - n_to / 2]);
    }
    const double scale = double(n_to) / n;
    for (auto& c : gh) c *= scale;
    dst.inverse(gh, out);
    return out;
}

// u = eps A(eps x) e^{ix} + c.c.,  v = eps B(eps x) e^{i(x - c_p t)} + c.c.,
// plus the eps^2 corrections when `corr` is given.
inline RealFields reconstruct_ansatz(const cvec& A, const cvec& B, const Grid1D& slow, double t,
                                     const ModelParams& p, const CorrectionAmplitudes* corr,
                                     const Grid1D& fine) {
    slow.validate();
    fine.validate();
    const double eps = p.epsilon;
    if (std::abs(slow.length - eps * fine.length) > 1e-10 * fine.length)
        throw GridMismatch("slow grid length must equal epsilon times the PDE length");
    if (int(A.size()) != slow.n || int(B.size()) != slow.n) throw GridMismatch("amplitude size");
    const double cp = velocities(p).c_p;
    const cvec Af = spectral_resample(A, fine.n), Bf = spectral_resample(B, fine.n);
    RealFields out{rvec(fine.n), rvec(fine.n)};
    for (int j = 0; j < fine.n; ++j) {
        const double x = fine.x(j);
        const cplx ex = std::exp(I * x), ev = std::exp(I * (x - cp * t));
        double u = 2.0 * eps * (Af[j] * ex).real();
        double v = 2.0 * eps * (Bf[j] * ev).real();
        if (corr) {
            const double e2 = eps * eps;
            u += e2 * (corr->A0(Af[j], Bf[j], t).real() + 2.0 * (corr->A2(Af[j], Bf[j], t) * ex * ex).real());
            v += e2 * (corr->B0(Af[j], Bf[j], t).real() + 2.0 * (corr->B2(Af[j], Bf[j], t) * ev * ev).real());
        }
        out.u[j] = u;
        out.v[j] = v;
    }
    return out;
}

}  // namespace thlab
