#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <string>

#include "model.hpp"

namespace thlab {

// gamma[0] is gamma_1, ..., gamma[11] is gamma_12.
struct AmplitudeCoefficients {
    std::array<cplx, 12> gamma{};

    cplx& operator()(int j) { return gamma.at(j - 1); }
    const cplx& operator()(int j) const { return gamma.at(j - 1); }
    double re(int j) const { return (*this)(j).real(); }
    double im(int j) const { return (*this)(j).imag(); }

    // The averaged system only sees gamma_1, gamma_2, gamma_7, gamma_8.
    AmplitudeCoefficients averaged_only() const {
        AmplitudeCoefficients out;
        for (int j : {1, 2, 7, 8}) out(j) = (*this)(j);
        return out;
    }
};

struct GammaOptions {
    // gamma_4 and gamma_5 are reproduced exactly as printed, but the printed
    // lines are missing a denominator, so they stay zero unless requested.
    bool include_quarantined = false;
};

namespace detail {

inline constexpr double kDenominatorFloor = 1e-12;

inline cplx checked(cplx d, const char* where) {
    if (!(std::abs(d) >= kDenominatorFloor))
        throw DegenerateDenominator(std::string("denominator vanishes in ") + where);
    return d;
}

}  // namespace detail

inline AmplitudeCoefficients compute_gammas(const NonlinearityCoeffs& nl, double cp,
                                            GammaOptions opt = {}) {
    using detail::checked;
    const auto& n = nl;
    const cplx c = cp;
    AmplitudeCoefficients g;

    g(1) = n.f11 * n.g20 * (16.0 * c - 19.0 * I) / checked(8.0 * c - 9.0 * I, "gamma1") +
           38.0 * n.f20 * n.f20 / 9.0 + 3.0 * n.f30;

    {
        const cplx den = checked((c - I) * (c + 9.0 * I) * (7.0 * c - 9.0 * I), "gamma2");
        const cplx q = 9.0 + c * (c + 8.0 * I);
        g(2) = 2.0 * ((7.0 * c - 9.0 * I) *
                      (n.f11 * (5.0 * n.f11 + n.g02 * q) + (n.f12 + 2.0 * n.f02 * n.f20) * q)) /
                   den +
               4.0 * n.f02 * n.g11 * (9.0 - I * c) * (4.0 * c - 5.0 * I) / den;
    }

    g(3) = n.f11 * (n.f20 * (c - 19.0 * I) - 9.0 * I * n.g11) / checked(9.0 * (c - I), "gamma3") +
           2.0 * I * n.f02 * n.g20 / checked(-8.0 * c + 9.0 * I, "gamma3") + n.f21;

    if (opt.include_quarantined) {
        const cplx p = 27.0 + 4.0 * c * (c + 3.0 * I);
        g(4) = 6.0 * p *
                   (n.f11 * n.g11 * (5.0 + 3.0 * I * c) * (c + 9.0 * I) +
                    (c + I) * (c + 9.0 * I) * (7.0 * c - 9.0 * I) * (2.0 * n.f02 * n.g20 + n.f21)) +
               6.0 * p * (n.f11 * n.f20 * (7.0 * c - 9.0 * I) * (-19.0 + c * (c + 12.0 * I)));
        // The printed "f_3" is read as f03, the only cubic f coefficient
        // missing from this line otherwise.
        g(5) = (c + I) * (c + 9.0 * I) * (7.0 * c - 9.0 * I) *
               (2.0 * n.f02 * n.g02 * (24.0 * c * c + 70.0 * I * c + 171.0) + 9.0 * n.f03 * p +
                3.0 * n.f02 * n.f11 * (8.0 * c * c + 26.0 * I * c + 57.0));
    }

    g(6) = n.f11 * n.g02 / checked(9.0 + 6.0 * I * c, "gamma6") +
           2.0 * I * n.f02 * n.g11 / checked(c + I, "gamma6") +
           I * n.f11 * n.f11 / checked(c + I, "gamma6") +
           2.0 * n.f02 * n.f20 / checked(9.0 - 2.0 * I * c, "gamma6") + n.f12;

    g(7) = 2.0 * (2.0 * I * n.f11 * n.g20 * (c + 5.0 * I) /
                      checked((c + I) * (c + 9.0 * I), "gamma7") +
                  n.g11 * n.g11 * (5.0 + 3.0 * I * c) /
                      checked(9.0 + c * (7.0 * c - 2.0 * I), "gamma7") +
                  n.f20 * n.g11 + 2.0 * n.g02 * n.g20 + n.g21);

    g(8) = n.f02 * n.g11 * (4.0 * c + 19.0 * I) / checked(2.0 * c + 9.0 * I, "gamma8") +
           2.0 * n.g02 * n.g02 * (12.0 * c - 19.0 * I) / checked(6.0 * c - 9.0 * I, "gamma8") +
           3.0 * n.g03;

    g(9) = n.g11 * n.g20 * (2.0 + 1.0 / checked(9.0 + 8.0 * I * c, "gamma9")) +
           38.0 * n.f20 * n.g20 / 9.0 + 3.0 * n.g30;

    g(10) = 2.0 * (5.0 * n.f11 * n.g11 / checked(9.0 + c * (c + 8.0 * I), "gamma10") +
                   n.g02 * n.g11 *
                       (-I / checked(c - I, "gamma10") +
                        I / checked(-7.0 * c + 9.0 * I, "gamma10") + 1.0) +
                   2.0 * n.f02 * n.g20 + n.g12);

    g(11) = -2.0 * I * n.f11 * n.g20 / checked(c - I, "gamma11") -
            I * n.g11 * n.g11 / checked(c - I, "gamma11") +
            2.0 * n.g02 * n.g20 / checked(9.0 + 8.0 * I * c, "gamma11") +
            n.f20 * n.g11 / 9.0 + n.g21;

    g(12) = n.g11 * (n.f11 * (9.0 + 6.0 * I * c) + n.g02 * (19.0 + 11.0 * I * c)) /
                checked(6.0 * c * c - 3.0 * I * c + 9.0, "gamma12") +
            2.0 * n.f02 * n.g20 / checked(9.0 - 2.0 * I * c, "gamma12") + n.g12;

    return g;
}

// Quadratic corrections to the ansatz.  A0 and B0 sit on the zero mode,
// A2 on e^{2ix} and B2 on e^{2i(x - c_p t)}.
class CorrectionAmplitudes {
public:
    CorrectionAmplitudes(const NonlinearityCoeffs& nl, double cp) : nl_(nl), cp_(cp) {
        using detail::checked;
        for (cplx d : {1.0 + I * cp, 1.0 - I * cp, 9.0 - I * cp, 9.0 - 2.0 * I * cp,
                       9.0 + 8.0 * I * cp, 9.0 + 7.0 * I * cp, 9.0 + 6.0 * I * cp})
            checked(d, "correction amplitudes");
    }

    cplx A0(cplx A, cplx B, double t) const { return zero_mode(A, B, t, nl_.f11, nl_.f20, nl_.f02); }
    cplx B0(cplx A, cplx B, double t) const { return zero_mode(A, B, t, nl_.g11, nl_.g20, nl_.g02); }

    cplx A2(cplx A, cplx B, double t) const {
        return nl_.f20 * A * A / 9.0 + phase(-t) / (9.0 - I * cp_) * nl_.f11 * A * B +
               phase(-2.0 * t) / (9.0 - 2.0 * I * cp_) * nl_.f02 * B * B;
    }

    cplx B2(cplx A, cplx B, double t) const {
        return phase(2.0 * t) / (9.0 + 8.0 * I * cp_) * nl_.g20 * A * A +
               phase(t) / (9.0 + 7.0 * I * cp_) * nl_.g11 * A * B +
               nl_.g02 * B * B / (9.0 + 6.0 * I * cp_);
    }

    double c_p() const { return cp_; }

private:
    cplx phase(double t) const { return std::exp(I * cp_ * t); }

    cplx zero_mode(cplx A, cplx B, double t, double c11, double c20, double c02) const {
        return phase(t) / (1.0 + I * cp_) * c11 * A * std::conj(B) +
               2.0 * (c20 * std::norm(A) + c02 * std::norm(B)) +
               phase(-t) / (1.0 - I * cp_) * c11 * std::conj(A) * B;
    }

    NonlinearityCoeffs nl_;
    double cp_;
};

inline CorrectionAmplitudes correction_amplitudes(const NonlinearityCoeffs& nl, double cp) {
    return CorrectionAmplitudes(nl, cp);
}

struct RadiiParams {
    double c_tilde = 1.0;
    double gA_tilde = 0.0;
    double gB_tilde = 0.0;
    double d_tilde = 1.0;

    static RadiiParams from(double gA, double gB, double c) {
        return {c, gA, gB, 1.0 - gA * gB};
    }
};

inline RadiiParams rescaled_radii_params(double alpha_u, double alpha_v,
                                         const AmplitudeCoefficients& g, double c0, double cg) {
    if (!(g.re(1) < 0.0) || !(g.re(8) < 0.0))
        throw InvalidSigns("rescaling needs Re gamma1 < 0 and Re gamma8 < 0");
    if (c0 == 0.0) throw ZeroSpeed("front speed c_0 must be nonzero");
    RadiiParams rp;
    rp.c_tilde = (cg - c0) * alpha_u / (c0 * alpha_v);
    rp.gA_tilde = alpha_v * g.re(2) / (alpha_u * std::abs(g.re(8)));
    rp.gB_tilde = alpha_u * g.re(7) / (alpha_v * std::abs(g.re(1)));
    rp.d_tilde = 1.0 - rp.gA_tilde * rp.gB_tilde;
    return rp;
}

}  // namespace thlab
