#pragma once

// Real gamma function by the Lanczos approximation (g = 7, 9 terms), with the
// reflection formula for the negative half-line.  1/Gamma is provided
// separately so that series over 1/Gamma(k+nu+1) handle pole arguments by
// returning 0.

#include "pearcey/core.hpp"

namespace pearcey {

namespace detail {

inline const double lanczos_g = 7.0;
inline const double lanczos_c[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

inline double gamma_lanczos_pos(double x) {
    // valid for x > 0.5
    double z = x - 1.0;
    double a = lanczos_c[0];
    for (int i = 1; i < 9; ++i) a += lanczos_c[i] / (z + i);
    double t = z + lanczos_g + 0.5;
    return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

}  // namespace detail

inline double gamma_fn(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("gamma_fn: non-finite argument");
    if (x > 170.6) throw std::overflow_error("gamma_fn: overflow range");
    if (x >= 0.5) return detail::gamma_lanczos_pos(x);
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    double s = std::sin(pi * x);
    if (s == 0.0) throw std::domain_error("gamma_fn: pole at non-positive integer");
    return pi / (s * detail::gamma_lanczos_pos(1.0 - x));
}

// 1/Gamma(x); zero at the poles x = 0, -1, -2, ...
inline double rgamma_fn(double x) {
    if (x >= 0.5) return 1.0 / detail::gamma_lanczos_pos(x);
    double s = std::sin(pi * x);
    if (std::abs(s) < 1e-290) return 0.0;
    return s * detail::gamma_lanczos_pos(1.0 - x) / pi;
}

}  // namespace pearcey
