#pragma once

// The contour functions P_k(z) = (prefactor) int_{gamma_k} t^{alpha-3}
// e^{zt + rho/t + 1/(2t^2)} dt and the 3x3 frame Psi~ built from them.
//
// Contour realizations: gamma_1/gamma_2 are circles through the origin
// centered at +-r (the integrand vanishes to all orders at the tangency
// because e^{1/(2t^2)} decays double-exponentially along vertical
// directions); gamma_3/gamma_4 run from infinity to 0 through the relevant
// saddle t ~ omega^{+-1} z^{-1/3}.  Radii track the saddle of
// z t^3 = rho t + 1 so that the integrand maximum sits on the contour and no
// exponential cancellation is introduced.

#include "pearcey/contour.hpp"
#include "pearcey/core.hpp"
#include "pearcey/linalg.hpp"

namespace pearcey {

namespace detail {

// positive root of X t^3 - rho t - 1 = 0 (saddle scale of the P_k integrals)
inline double saddle_scale(double X, double rho) {
    double t = std::cbrt(1.0 / X);
    for (int i = 0; i < 60; ++i) {
        double f = X * t * t * t - rho * t - 1.0;
        double fp = 3.0 * X * t * t - rho;
        double dt = f / fp;
        t -= dt;
        if (std::abs(dt) < 1e-14 * t) break;
    }
    return (t > 0.0 && std::isfinite(t)) ? t : std::cbrt(1.0 / X);
}

}  // namespace detail

// integrand power t^{alpha-3} with the argument continued into the contour's
// sector: (pi/2, 3pi/2) for gamma_2, principal elsewhere.
inline cplx sector_power(cplx t, double p, int k) {
    double th = princ_arg(t);
    if (k == 2 && th < 0.0) th += 2.0 * pi;
    return std::exp(p * (std::log(std::abs(t)) + iu * th));
}

struct PkResult {
    cplx p, dp, ddp;  // P_k and its first two z-derivatives
};

inline ContourPath pk_contour(int k, cplx z, double rho) {
    double X = std::max(std::abs(z), 0.05);
    double ts = detail::saddle_scale(X, rho);
    double argz = princ_arg(z);
    ContourPath path;
    if (k == 1) {
        // circle through 0 centered at +r, counterclockwise; r chosen so the
        // circle crosses the saddle t ~ |z|^{-1/3} e^{-i arg(z)/3}
        double r = std::min(ts / (2.0 * std::cos(argz / 3.0)), 2.0);
        path.add_circle(r, r, -pi, pi);
        return path;
    }
    if (k == 2) {
        // clockwise: down from the tangency at 0, left semicircle through the
        // saddle radius, back up into 0.  The maximum of |integrand| along
        // this path sits at the saddle for arg z in [0, 3pi/4].
        double r = std::min(ts, 2.0);
        path.add_line(cplx(0.0), -iu * r);
        path.add_circle(cplx(0.0), r, -pi / 2.0, -3.0 * pi / 2.0);
        path.add_line(iu * r, cplx(0.0));
        return path;
    }
    // rays through the decaying saddles, oriented toward the origin
    double phi = (k == 3) ? (2.0 * pi / 3.0 - argz / 3.0) : (-2.0 * pi / 3.0 - argz / 3.0);
    double beta;
    if (k == 3)
        beta = (argz <= pi / 2.0) ? 3.0 * pi / 4.0 : pi / 2.0;
    else
        beta = -3.0 * pi / 4.0;
    double rb = std::max(4.0 * ts, 0.75);
    cplx bend = rb * std::exp(iu * phi);
    double decay = -std::cos(argz + beta);
    if (decay < 0.05)
        throw std::domain_error("pk_contour: no decaying tail direction for this z");
    double L = std::min(55.0 / (std::abs(z) * decay) + 2.0 * rb, 3e6);
    cplx far = bend + L * std::exp(iu * beta);
    path.add_line(far, bend);
    path.add_line(bend, cplx(0.0));
    return path;
}

inline PkResult pk_eval(int k, cplx z, const KernelParams& kp, double tol = 1e-12) {
    if (k < 1 || k > 4) throw std::invalid_argument("pk_eval: k in 1..4");
    kp.validate();
    if (tol < 1e-14) tol = 1e-14;
    if (k == 4 && std::abs(princ_arg(z)) > pi / 5.0)
        throw std::domain_error("pk_eval: gamma_4 tail diverges off the real direction");

    ContourPath path = pk_contour(k, z, kp.rho);
    const double aexp = kp.alpha - 3.0;
    auto f = [&](cplx t, cplx* out) {
        cplx w = sector_power(t, aexp, k) * std::exp(z * t + kp.rho / t + 1.0 / (2.0 * t * t));
        out[0] = w;
        out[1] = w * t;
        out[2] = w * t * t;
    };
    cplx vals[3];
    double errs[3];
    detail::integrate_multi(f, 3, path, tol, vals, errs);

    cplx pref(1.0);
    if (k == 2 || k == 3) pref = std::exp(-kp.alpha * pi * iu);
    if (k == 4) pref = std::exp(kp.alpha * pi * iu);
    return {pref * vals[0], pref * vals[1], pref * vals[2]};
}

// Psi~(z): columns (P_2, P_3, P_1) with rows (value, d/dz, d^2/dz^2), scaled
// by e^{rho^2/6}/sqrt(2 pi).  Mp is the derivative frame whose last row uses
// P''' = (P + rho P' - alpha P'')/z from the third-order ODE.
struct PsiTildeFrame {
    cplx z;
    KernelParams params;
    Mat3 M;
    Mat3 Mp;
};

inline PsiTildeFrame psi_tilde(cplx z, const KernelParams& kp, double tol = 1e-12) {
    if (std::real(z) <= 0.0 && std::imag(z) == 0.0)
        throw std::invalid_argument("psi_tilde: need Re z > 0 or z in the upper sector");
    PkResult cols[3] = {pk_eval(2, z, kp, tol), pk_eval(3, z, kp, tol), pk_eval(1, z, kp, tol)};
    const double pref = std::exp(kp.rho * kp.rho / 6.0) / std::sqrt(2.0 * pi);
    PsiTildeFrame f;
    f.z = z;
    f.params = kp;
    for (int j = 0; j < 3; ++j) {
        f.M(0, j) = pref * cols[j].p;
        f.M(1, j) = pref * cols[j].dp;
        f.M(2, j) = pref * cols[j].ddp;
        cplx p3 = (cols[j].p + kp.rho * cols[j].dp - kp.alpha * cols[j].ddp) / z;
        f.Mp(0, j) = pref * cols[j].dp;
        f.Mp(1, j) = pref * cols[j].ddp;
        f.Mp(2, j) = pref * p3;
    }
    return f;
}

inline PsiTildeFrame psi_tilde(double x, const KernelParams& kp, double tol = 1e-12) {
    if (!(x > 0.0)) throw std::invalid_argument("psi_tilde: x must be > 0");
    return psi_tilde(cplx(x, 0.0), kp, tol);
}

}  // namespace pearcey
