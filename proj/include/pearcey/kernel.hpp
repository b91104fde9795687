#pragma once

// The hard edge Pearcey kernel in three representations: the Psi~ form (any
// alpha > -1), the double contour integral and the P/Q differential form
// (integer alpha >= 2).  Gamma is the clockwise loop through the origin
// tangent from the left (it cannot be traded for a circle around 0: the
// essential singularity grows along the positive axis), Sigma the
// counterclockwise circle |u| = 2 enclosing it.
//
// The Q weight convention is switchable: "printed" uses u^{alpha-4}, "ode"
// uses u^{-alpha}.  The two coincide at alpha = 2 and are told apart at
// alpha = 3 by agreement with the double integral and by the residual of
// y Q''' + (3-alpha) Q'' - rho Q' + Q.

#include "pearcey/pk.hpp"

namespace pearcey {

struct FHVectors {
    cplx f[3];
    cplx h[3];
};

// f = first column of Psi~(x); h = (1/2pi i) second column of Psi~(x)^{-T}.
inline FHVectors fh_vectors_from_frame(const PsiTildeFrame& fr) {
    FHVectors v;
    for (int i = 0; i < 3; ++i) v.f[i] = fr.M(i, 0);
    Mat3 inv = fr.M.inverse();
    for (int i = 0; i < 3; ++i) v.h[i] = inv(1, i) / (2.0 * pi * iu);  // row 2 of M^{-1}
    return v;
}

inline FHVectors fh_vectors(double x, const KernelParams& kp, double tol = 1e-12) {
    return fh_vectors_from_frame(psi_tilde(x, kp, tol));
}

// K(x,y) from two prebuilt frames: (1/(2 pi i (x-y))) [Psi~(y)^{-1} Psi~(x)]_{21}.
inline double kernel_psi_frames(const PsiTildeFrame& fx, const PsiTildeFrame& fy) {
    cplx x = fx.z, y = fy.z;
    if (std::abs(x - y) < 1e-8)
        throw std::invalid_argument("kernel_psi: |x-y| too small, use kernel_diag");
    Mat3 inv = fy.M.inverse();
    cplx e(0.0);
    for (int k = 0; k < 3; ++k) e += inv(1, k) * fx.M(k, 0);
    cplx v = e / (2.0 * pi * iu * (x - y));
    if (std::abs(std::imag(v)) > 1e-8 * std::max(1.0, std::abs(v)))
        throw numerical_error("kernel_psi: imaginary leakage " +
                              std::to_string(std::imag(v)));
    return std::real(v);
}

inline double kernel_psi(double x, double y, const KernelParams& kp, double tol = 1e-12) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("kernel_psi: x,y > 0 required");
    return kernel_psi_frames(psi_tilde(x, kp, tol), psi_tilde(y, kp, tol));
}

// Diagonal value by l'Hopital: (1/2 pi i) [Psi~(x)^{-1} Psi~'(x)]_{21}.
inline double kernel_diag_frame(const PsiTildeFrame& fx) {
    Mat3 inv = fx.M.inverse();
    cplx e(0.0);
    for (int k = 0; k < 3; ++k) e += inv(1, k) * fx.Mp(k, 0);
    cplx v = e / (2.0 * pi * iu);
    return std::real(v);
}

inline double kernel_diag(double x, const KernelParams& kp, double tol = 1e-12) {
    if (!(x > 0.0)) throw std::invalid_argument("kernel_diag: x > 0 required");
    return kernel_diag_frame(psi_tilde(x, kp, tol));
}

namespace detail {

inline void require_integer_alpha(const KernelParams& kp) {
    if (!kp.alpha_is_integer() || kp.alpha < 2.0)
        throw std::invalid_argument("representation requires integer alpha >= 2");
}

}  // namespace detail

inline ContourPath gamma_drop(double r = 0.8, bool clockwise = true) {
    // loop through 0 tangent from the left; the integrand vanishes to all
    // orders at the tangency
    ContourPath g;
    if (clockwise)
        g.add_circle(-r, r, 0.0, -2.0 * pi);
    else
        g.add_circle(-r, r, -2.0 * pi, 0.0);
    return g;
}

// Saddle-tracking radii: Gamma passes the saddle of x t^3 = rho t + 1, Sigma
// the saddle of y u^3 = rho u + 1, nested so 1/(u-t) stays smooth.
inline std::pair<double, double> double_integral_radii(double x, double y, double rho) {
    double rt = std::clamp(detail::saddle_scale(std::max(x, 0.05), rho), 0.15, 0.8);
    double ru = std::clamp(detail::saddle_scale(std::max(y, 0.05), rho), 2.2 * rt, 2.0);
    return {rt, ru};
}

inline double kernel_double(double x, double y, const KernelParams& kp, double tol = 1e-11,
                            double gamma_radius = 0.0) {
    detail::require_integer_alpha(kp);
    if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("kernel_double: x,y > 0");
    const int ia = static_cast<int>(std::lround(kp.alpha));
    const double rho = kp.rho;
    auto [rt, ru] = double_integral_radii(x, y, rho);
    if (gamma_radius > 0.0) rt = gamma_radius;  // deformation-invariance probes
    if (2.0 * rt >= ru) ru = std::min(2.2 * rt, 2.4);
    ContourPath gamma = gamma_drop(rt);
    auto outer = [&](cplx u) {
        auto inner = [&](cplx t) {
            cplx r = std::exp(rho / t + 1.0 / (2.0 * t * t) - rho / u - 1.0 / (2.0 * u * u) +
                              x * t - y * u);
            cplx tu = t / u;
            cplx p(1.0);
            for (int i = 0; i < ia; ++i) p *= tu;
            return r * p / (u - t);
        };
        return integrate_contour(inner, gamma, tol).value;
    };
    auto sigma = ContourPath::circle(0.0, ru, -pi, pi);
    cplx val = integrate_contour(outer, sigma, tol).value;
    cplx k = val / std::pow(2.0 * pi * iu, 2);
    return std::real(k);
}

enum class QConvention { Printed, OdeConsistent };  // u^{alpha-4} vs u^{-alpha}

struct PQEval {
    cplx p, dp, ddp;      // P and z-derivatives on |t| = 1
    cplx q, dq, ddq, dddq;  // Q and y-derivatives on |u| = 2
};

inline PQEval pq_eval(double x, double y, const KernelParams& kp, QConvention conv,
                      double tol = 1e-12) {
    detail::require_integer_alpha(kp);
    PQEval r;
    const double rho = kp.rho;
    const double pexp = kp.alpha - 3.0;
    const double qexp = (conv == QConvention::Printed) ? kp.alpha - 4.0 : -kp.alpha;
    // the P and Q loops are independent closed contours here (no 1/(u-t)
    // coupling), so each tracks its own saddle
    double rt = std::clamp(detail::saddle_scale(std::max(x, 0.05), rho), 0.15, 0.8);
    double ru = std::clamp(detail::saddle_scale(std::max(y, 0.05), rho), 0.15, 2.0);
    {
        auto f = [&](cplx t, cplx* out) {
            cplx w = cpow(t, pexp) * std::exp(x * t + rho / t + 1.0 / (2.0 * t * t));
            out[0] = w;
            out[1] = w * t;
            out[2] = w * t * t;
        };
        ContourPath path = gamma_drop(rt);
        cplx v[3];
        double e[3];
        detail::integrate_multi(f, 3, path, tol, v, e);
        r.p = v[0];
        r.dp = v[1];
        r.ddp = v[2];
    }
    {
        auto f = [&](cplx u, cplx* out) {
            cplx w = cpow(u, qexp) * std::exp(-y * u - rho / u - 1.0 / (2.0 * u * u));
            out[0] = w;
            out[1] = -w * u;
            out[2] = w * u * u;
            out[3] = -w * u * u * u;
        };
        auto path = ContourPath::circle(0.0, ru, -pi, pi);
        cplx v[4];
        double e[4];
        detail::integrate_multi(f, 4, path, tol, v, e);
        r.q = v[0];
        r.dq = v[1];
        r.ddq = v[2];
        r.dddq = v[3];
    }
    return r;
}

// Residual of y Q''' + (3 - alpha) Q'' - rho Q' + Q, relative to the largest
// term; the convention consistent with the kernel satisfies this ODE.
inline double q_ode_residual(double y, const KernelParams& kp, QConvention conv,
                             double tol = 1e-12) {
    PQEval e = pq_eval(1.0, y, kp, conv, tol);
    cplx resid = y * e.dddq + (3.0 - kp.alpha) * e.ddq - kp.rho * e.dq + e.q;
    double scale = std::max({std::abs(y * e.dddq), std::abs(e.ddq), std::abs(e.q), 1e-300});
    return std::abs(resid) / scale;
}

inline double p_ode_residual(double x, const KernelParams& kp, double tol = 1e-12) {
    PQEval e = pq_eval(x, 1.0, kp, QConvention::Printed, tol);
    // P''' via the x-derivative of the same closed-loop integral
    auto f = [&](cplx t) {
        return cpow(t, kp.alpha - 3.0) * t * t * t *
               std::exp(x * t + kp.rho / t + 1.0 / (2.0 * t * t));
    };
    ContourPath path = gamma_drop();
    cplx p3 = integrate_contour(f, path, tol).value;
    cplx resid = x * p3 + kp.alpha * e.ddp - kp.rho * e.dp - e.p;
    double scale = std::max({std::abs(x * p3), std::abs(e.p), 1e-300});
    return std::abs(resid) / scale;
}

// Differential form of the kernel.  The first numerator term carries the
// factor y (dropped in some displays; the double-integral identity fixes it):
//   P(x)[y Q''(y) - (alpha-2) Q'(y) - rho Q(y)]
//     - P'(x)[y Q'(y) - (alpha-1) Q(y)] + y P''(x) Q(y),
// divided by (2 pi i)^2 (x - y).
inline double kernel_pq(double x, double y, const KernelParams& kp, QConvention conv,
                        double tol = 1e-12) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("kernel_pq: x,y > 0");
    PQEval e = pq_eval(x, y, kp, conv, tol);
    cplx num = e.p * (y * e.ddq - (kp.alpha - 2.0) * e.dq - kp.rho * e.q) -
               e.dp * (y * e.dq - (kp.alpha - 1.0) * e.q) + y * e.ddp * e.q;
    cplx k = num / (std::pow(2.0 * pi * iu, 2) * (x - y));
    return std::real(k);
}

// Resolves the Q convention by agreement with the double integral.
struct QConventionReport {
    QConvention matching;
    double dev_printed, dev_ode;       // kernel deviation per convention
    double ode_resid_printed, ode_resid_ode;
    bool conventions_coincide;  // alpha == 2
};

inline QConventionReport resolve_q_convention(const KernelParams& kp, double x = 1.0,
                                              double y = 2.0) {
    QConventionReport r{};
    double kd = kernel_double(x, y, kp);
    double kp_printed = kernel_pq(x, y, kp, QConvention::Printed);
    double kp_ode = kernel_pq(x, y, kp, QConvention::OdeConsistent);
    double scale = std::max(std::abs(kd), 1e-300);
    r.dev_printed = std::abs(kp_printed - kd) / scale;
    r.dev_ode = std::abs(kp_ode - kd) / scale;
    r.ode_resid_printed = q_ode_residual(y, kp, QConvention::Printed);
    r.ode_resid_ode = q_ode_residual(y, kp, QConvention::OdeConsistent);
    r.matching = (r.dev_ode <= r.dev_printed) ? QConvention::OdeConsistent : QConvention::Printed;
    r.conventions_coincide = std::abs(kp.alpha - 2.0) < 1e-12;
    return r;
}

}  // namespace pearcey
