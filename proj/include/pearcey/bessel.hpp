#pragma once

// Modified Bessel functions I_nu, K_nu of real order and complex argument on
// the principal sector |arg z| < pi.
//
// Branch strategy:
//   I: power series with compensated summation for |z| <= 30, two-exponential
//      asymptotic series beyond.
//   K: asymptotic series for |z| > 30; the integral representation
//      int_0^inf e^{-z cosh t} cosh(nu t) dt for Re z >= 1.5, |z| >= 2; the
//      reflection formula pi (I_{-nu} - I_nu) / (2 sin nu pi) otherwise, with
//      the integer-order limit taken by averaging nu +- 1e-6.

#include "pearcey/contour.hpp"
#include "pearcey/core.hpp"
#include "pearcey/gamma.hpp"

namespace pearcey {

namespace detail {

struct KahanC {
    cplx sum{0.0}, comp{0.0};
    void add(cplx term) {
        cplx y = term - comp;
        cplx t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

inline cplx bessel_i_series(double nu, cplx z) {
    if (z == cplx(0.0)) {
        if (nu == 0.0) return 1.0;
        if (nu > 0.0) return 0.0;
        throw std::domain_error("bessel_i: divergent at z=0 for nu<0");
    }
    cplx h = z / 2.0;
    cplx q = h * h;
    KahanC acc;
    cplx pw(1.0);
    for (int k = 0; k < 600; ++k) {
        double rg = rgamma_fn(k + nu + 1.0);
        cplx term = pw * rg;
        acc.add(term);
        pw *= q / double(k + 1);
        if (k > 4 && std::abs(term) < 1e-18 * std::abs(acc.sum) && std::abs(pw * rg) < 1e-18 * std::abs(acc.sum))
            break;
    }
    return std::exp(nu * std::log(h)) * acc.sum;
}

// a_k(nu)/z^k terms of the Poincare series, summed to optimal truncation.
inline void bessel_asym_sums(double nu, cplx z, cplx& s_alt, cplx& s_plus) {
    double mu = 4.0 * nu * nu;
    cplx term(1.0);
    s_alt = 1.0;
    s_plus = 1.0;
    double last = 1.0;
    int sign = 1;
    for (int k = 1; k < 80; ++k) {
        double od = 2.0 * k - 1.0;
        term *= (mu - od * od) / (8.0 * double(k)) / z;
        double m = std::abs(term);
        if (m > last) break;  // divergence onset
        sign = -sign;
        s_alt += double(sign) * term;
        s_plus += term;
        if (m < 1e-18) break;
        last = m;
    }
}

inline cplx bessel_i_asym(double nu, cplx z) {
    cplx s_alt, s_plus;
    bessel_asym_sums(nu, z, s_alt, s_plus);
    cplx pref = 1.0 / std::sqrt(2.0 * pi * z);
    double sg = (std::imag(z) >= 0.0) ? 1.0 : -1.0;
    cplx refl = std::exp(sg * (nu + 0.5) * pi * iu);
    return pref * (std::exp(z) * s_alt + refl * std::exp(-z) * s_plus);
}

inline cplx bessel_k_asym(double nu, cplx z) {
    cplx s_alt, s_plus;
    bessel_asym_sums(nu, z, s_alt, s_plus);
    return std::sqrt(pi / (2.0 * z)) * std::exp(-z) * s_plus;
}

inline cplx bessel_k_integral(double nu, cplx z) {
    const double x = std::real(z);
    // cutoff: Re z (cosh T - 1) - |nu| T >= 46
    double T = std::acosh(1.0 + 48.0 / x);
    for (int it = 0; it < 40; ++it) {
        if (x * (std::cosh(T) - 1.0) - std::abs(nu) * T >= 46.0) break;
        T += 0.25;
    }
    double U = std::sinh(T);
    // substitution u = sinh t: frequency of oscillation bounded by |Im z|
    auto g = [&](cplx uc) {
        double u = std::real(uc);
        double w = std::sqrt(1.0 + u * u);
        double t = std::asinh(u);
        return std::exp(-z * w) * std::cosh(nu * t) / w;
    };
    int nseg = std::min(200, std::max(2, int(U * (std::abs(std::imag(z)) + 1.0) / 12.0)));
    ContourPath path;
    for (int i = 0; i < nseg; ++i)
        path.add_line(cplx(U * i / nseg, 0.0), cplx(U * (i + 1) / nseg, 0.0));
    return integrate_contour(g, path, 1e-14).value;
}

inline cplx bessel_k_reflect(double nu, cplx z) {
    auto via = [&](double v) {
        return pi * (bessel_i_series(-v, z) - bessel_i_series(v, z)) / (2.0 * std::sin(v * pi));
    };
    double r = std::round(nu);
    if (std::abs(nu - r) > 1e-4) return via(nu);
    const double eps = 1e-6;
    return 0.5 * (via(r + eps) + via(r - eps));
}

}  // namespace detail

inline void check_bessel_arg(cplx z) {
    if (std::real(z) < 0.0 && std::imag(z) == 0.0)
        throw std::domain_error("bessel: argument on the cut arg z = pi");
}

inline cplx bessel_i(double nu, cplx z) {
    check_bessel_arg(z);
    if (std::abs(z) <= 30.0) return detail::bessel_i_series(nu, z);
    return detail::bessel_i_asym(nu, z);
}

inline cplx bessel_k(double nu, cplx z) {
    check_bessel_arg(z);
    double m = std::abs(z);
    if (m > 30.0) return detail::bessel_k_asym(nu, z);
    if (m >= 2.0 && std::real(z) >= 1.5) return detail::bessel_k_integral(nu, z);
    return detail::bessel_k_reflect(nu, z);
}

struct BesselDerivs {
    cplx ip, kp;
};

// I'_nu = (I_{nu-1} + I_{nu+1})/2,  K'_nu = -(K_{nu-1} + K_{nu+1})/2
inline BesselDerivs bessel_derivs(double nu, cplx z) {
    BesselDerivs d;
    d.ip = 0.5 * (bessel_i(nu - 1.0, z) + bessel_i(nu + 1.0, z));
    d.kp = -0.5 * (bessel_k(std::abs(nu - 1.0), z) + bessel_k(nu + 1.0, z));
    return d;
}

}  // namespace pearcey
