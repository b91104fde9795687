#pragma once

// The 2x2 Bessel model problem: region-dependent assembly from I_alpha and
// K_alpha with principal z^{1/2}.  Rays sit at arg z = +-2pi/3 and pi; the
// jump relations hold with the rays oriented toward the origin.

#include "pearcey/bessel.hpp"
#include "pearcey/linalg.hpp"

namespace pearcey {

enum class BesselRegion { I, II, III };

inline BesselRegion bessel_region(cplx z) {
    double a = princ_arg(z);
    if (std::abs(a) < 2.0 * pi / 3.0) return BesselRegion::I;
    return a > 0.0 ? BesselRegion::II : BesselRegion::III;
}

inline Mat2 bessel_parametrix(cplx z, double alpha, BesselRegion region) {
    cplx zh = std::sqrt(z);  // principal branch
    cplx ia = bessel_i(alpha, zh);
    cplx ka = bessel_k(alpha, zh);
    BesselDerivs d = bessel_derivs(alpha, zh);
    Mat2 base;
    base(0, 0) = ia;
    base(0, 1) = iu / pi * ka;
    base(1, 0) = pi * iu * zh * d.ip;
    base(1, 1) = -zh * d.kp;
    Mat2 right;
    cplx ea = std::exp(alpha * pi * iu);
    switch (region) {
        case BesselRegion::I:
            right(0, 1) = 1.0;
            right(1, 0) = 1.0;
            break;
        case BesselRegion::II:
            right(0, 1) = 1.0;
            right(1, 0) = 1.0;
            right(1, 1) = -ea;
            break;
        case BesselRegion::III:
            right(0, 1) = 1.0;
            right(1, 0) = 1.0;
            right(1, 1) = 1.0 / ea;
            break;
    }
    return base * right;
}

inline Mat2 bessel_parametrix(cplx z, double alpha) {
    double a = princ_arg(z);
    if (std::imag(z) == 0.0 && std::real(z) <= 0.0)
        throw std::domain_error("bessel_parametrix: z on the ray Gamma_2");
    if (std::abs(std::abs(a) - 2.0 * pi / 3.0) < 1e-14)
        throw std::domain_error("bessel_parametrix: z on a jump ray");
    return bessel_parametrix(z, alpha, bessel_region(z));
}

}  // namespace pearcey
