#pragma once

#include <complex>
#include <utility>

#include "errors.hpp"

namespace thlab {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

// Critical wave numbers of both instabilities are normalised to 1.
struct ModelParams {
    double c_d = 1.0;
    double alpha_u = 1.0;
    double alpha_v = 1.0;
    double epsilon = 0.1;

    void validate() const {
        if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
    }
};

// Taylor coefficients of the quadratic-plus-cubic nonlinearities f and g.
struct NonlinearityCoeffs {
    double f20 = 0, f11 = 0, f02 = 0, f30 = 0, f21 = 0, f12 = 0, f03 = 0;
    double g20 = 0, g11 = 0, g02 = 0, g30 = 0, g21 = 0, g12 = 0, g03 = 0;
};

inline cplx dispersion_turing(double k, const ModelParams& p) {
    const double s = 1.0 - k * k;
    return {-s * s + p.epsilon * p.epsilon * p.alpha_u, 0.0};
}

inline cplx dispersion_turing_hopf(double k, const ModelParams& p) {
    const double s = 1.0 - k * k;
    return cplx(-s * s + p.epsilon * p.epsilon * p.alpha_v, -p.c_d * k * k * k);
}

struct Velocities {
    double c_p;
    double c_g;
};

// Phase velocity c_p = c_d matches the carrier e^{i(x - c_p t)}.
inline Velocities velocities(const ModelParams& p) { return {p.c_d, 3.0 * p.c_d}; }

inline std::pair<double, double> eval_nonlinearity(double u, double v,
                                                   const NonlinearityCoeffs& nl) {
    const double uu = u * u, uv = u * v, vv = v * v;
    const double f = nl.f20 * uu + nl.f11 * uv + nl.f02 * vv + nl.f30 * uu * u +
                     nl.f21 * uu * v + nl.f12 * u * vv + nl.f03 * vv * v;
    const double g = nl.g20 * uu + nl.g11 * uv + nl.g02 * vv + nl.g30 * uu * u +
                     nl.g21 * uu * v + nl.g12 * u * vv + nl.g03 * vv * v;
    return {f, g};
}

}  // namespace thlab
