#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"

namespace thlab {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 1e-3;
    double h_max = std::numeric_limits<double>::infinity();
    long max_steps = 100'000'000;
};

template <int N>
struct OdeResult {
    double t;
    Vec<N> y;
    double h;          // last accepted step magnitude, reusable as h_init
    long steps;
    bool stopped;      // observer asked to stop
};

namespace detail {
struct NoObserver {
    template <class V>
    bool operator()(double, const V&) const { return true; }
};
}  // namespace detail

// Dormand-Prince 5(4) with FSAL and elementary step control.  Integrates
// backwards when t1 < t0.  The observer sees every accepted step and may
// stop the integration by returning false.
template <int N, class F, class Obs = detail::NoObserver>
OdeResult<N> dopri5(F&& f, double t0, const Vec<N>& y0, double t1, const OdeOptions& o,
                    Obs&& observer = Obs{}) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double dir = t1 >= t0 ? 1.0 : -1.0;
    double t = t0;
    Vec<N> y = y0;
    Vec<N> k1 = f(t, y), k2, k3, k4, k5, k6, k7, ynew, err;
    double h = std::min(std::abs(o.h_init), o.h_max);
    long steps = 0;

    while (dir * (t1 - t) > 0.0) {
        if (steps >= o.max_steps) throw Error("ODE step budget exhausted");
        const double remaining = std::abs(t1 - t);
        const bool last = h >= remaining;
        const double hs = dir * (last ? remaining : h);

        k2 = f(t + c2 * hs, y + hs * (a21 * k1));
        k3 = f(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
        k4 = f(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = f(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = f(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = f(t + hs, ynew);
        err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double en = 0.0;
        for (int i = 0; i < y.size(); ++i) {
            const double sc = o.atol + o.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            en = std::max(en, std::abs(err[i]) / sc);
        }
        if (!std::isfinite(en)) {
            h *= 0.25;
            if (h < 1e-300) throw BlowUp("non-finite ODE state", t);
            continue;
        }
        const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        if (en <= 1.0) {
            t = last ? t1 : t + hs;
            y = ynew;
            k1 = k7;
            ++steps;
            if (!last) h = std::min(h * fac, o.h_max);
            if (!observer(t, y)) return {t, y, h, steps, true};
        } else {
            h *= std::max(fac, 0.1);
            if (h < 1e-14 * std::max(1.0, std::abs(t))) throw Error("ODE step size underflow");
        }
    }
    return {t, y, h, steps, false};
}

}  // namespace thlab
