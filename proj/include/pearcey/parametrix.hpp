#pragma once

// Global and local parametrices of the steepest-descent analysis: N_0 built
// from the rational functions N_j(w) with sqrt(w(w-1)) cut along the images
// of the surface cuts, the Szego-type correction to N_alpha, the conformal
// maps at 0 and 1, the Bessel-model local parametrices with their analytic
// prefactors, and the order-s^{-2/3} correction matrices (residues, Laurent
// data, R_1) that produce the derivative expansion of the log-determinant.

#include "pearcey/bessel_parametrix.hpp"
#include "pearcey/contour.hpp"
#include "pearcey/surface.hpp"

namespace pearcey {

namespace detail {

// Polar tables for the cut images gamma_1^- = w_{2,-}((-inf,0]) (hangs from 0
// toward arg -2pi/3) and gamma_2^- = w_{2,-}([1,inf)) (hangs from 1 toward
// arg -pi/3).  Both are graphs angle(radius) in their polar frames.
struct CutTable {
    std::vector<double> logr, phi;
    double phi_small, phi_large;
    double angle(double r) const {
        double lr = std::log(r);
        if (lr <= logr.front()) return phi_small;
        if (lr >= logr.back()) return phi_large;
        auto it = std::upper_bound(logr.begin(), logr.end(), lr);
        std::size_t i = static_cast<std::size_t>(it - logr.begin());
        double t = (lr - logr[i - 1]) / (logr[i] - logr[i - 1]);
        return phi[i - 1] + t * (phi[i] - phi[i - 1]);
    }
};

inline const CutTable& cut_gamma1() {
    static const CutTable table = [] {
        CutTable t;
        t.phi_small = -pi / 2.0;
        t.phi_large = -2.0 * pi / 3.0;
        for (int i = 0; i <= 2000; ++i) {
            double u = std::pow(10.0, -8.0 + 16.0 * i / 2000.0);  // u = eta^{1/3} - 1 scale
            double e13 = 1.0 + u;
            cplx w = 0.5 * (omega2 * e13 + omega / e13 + 1.0);
            if (std::abs(w) < 1e-12) continue;
            t.logr.push_back(std::log(std::abs(w)));
            t.phi.push_back(princ_arg(w));
        }
        return t;
    }();
    return table;
}

inline const CutTable& cut_gamma2() {
    static const CutTable table = [] {
        CutTable t;
        t.phi_small = -pi / 2.0;
        t.phi_large = -pi / 3.0;
        const cplx e3 = std::exp(iu * pi / 3.0);
        for (int i = 0; i <= 2000; ++i) {
            double u = std::pow(10.0, -8.0 + 16.0 * i / 2000.0);
            double m = 1.0 + u;  // |eta_-|^{1/3}
            cplx w = 0.5 * (m / e3 + e3 / m + 1.0);
            cplx d = w - 1.0;
            if (std::abs(d) < 1e-12) continue;
            t.logr.push_back(std::log(std::abs(d)));
            t.phi.push_back(princ_arg(d));
        }
        return t;
    }();
    return table;
}

// Sign flips relative to the principal branches: -1 inside the lune between
// the negative real ray and the hanging cut curve.  Points exponentially
// close to a curve (z near the real cuts) are resolved by which sheet and
// z-side produced them: only (sheet 3, Im z > 0) lands on the lune side of
// gamma_1^- and only (sheet 2, Im z < 0) on the lune side of gamma_2^-.
inline constexpr double curve_tau = 3e-3;

inline bool in_lune1(cplx w, int sheet, double imz) {
    double dphi = princ_arg(w) - cut_gamma1().angle(std::abs(w));
    if (std::abs(dphi) > curve_tau) return dphi < 0.0;
    return sheet == 3 && imz > 0.0;
}
inline bool in_lune2(cplx w, int sheet, double imz) {
    cplx d = w - 1.0;
    double dphi = princ_arg(d) - cut_gamma2().angle(std::abs(d));
    if (std::abs(dphi) > curve_tau) return dphi < 0.0;
    return sheet == 2 && imz < 0.0;
}

}  // namespace detail

// sqrt(w(w-1)) with branch cuts along gamma_1^- u gamma_2^-, normalized to
// +sqrt(2) at w = 2; evaluated for w = w_sheet(z).
inline cplx surface_sqrt(cplx w, int sheet, double imz) {
    double sgn = 1.0;
    if (detail::in_lune1(w, sheet, imz)) sgn = -sgn;
    if (detail::in_lune2(w, sheet, imz)) sgn = -sgn;
    return sgn * std::sqrt(w) * std::sqrt(w - 1.0);
}

// log w with the cut along gamma_1^- (continues through the negative axis)
inline cplx surface_log(cplx w, int sheet, double imz) {
    cplx l = std::log(w);
    if (detail::in_lune1(w, sheet, imz)) l += 2.0 * pi * iu;
    return l;
}

inline const Mat3& n0_left_factor() {
    static const Mat3 m = [] {
        Mat3 a;
        double t23 = std::pow(2.0, 2.0 / 3.0), t13 = cbrt2;
        a(0, 0) = -5.0 / t23;
        a(0, 1) = -7.0 * t13;
        a(0, 2) = 1.0 / t23;
        a(1, 0) = 4.0;
        a(1, 1) = -2.0;
        a(1, 2) = -2.0;
        a(2, 0) = -std::pow(2.0, 5.0 / 3.0);
        a(2, 1) = std::pow(2.0, 8.0 / 3.0);
        a(2, 2) = -std::pow(2.0, 5.0 / 3.0);
        return a;
    }();
    return m;
}

inline cplx n_ratio(int i, cplx w, int sheet, double imz) {
    cplx s = surface_sqrt(w, sheet, imz);
    if (i == 0) return w * w / s;
    if (i == 1) return w * (w - 1.5) / s;
    return (w - 1.5) * (w - 1.5) / s;
}

inline Mat3 n0_eval(cplx z) {
    if (on_surface_cut(z)) throw std::domain_error("n0_eval: z on a cut");
    WTriple w = w_triple(z);
    Mat3 nm;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) nm(i, j) = n_ratio(i, w[j + 1], j + 1, std::imag(z));
    return n0_left_factor() * nm * (1.0 / 9.0);
}

inline Mat3 c_alpha(double alpha) {
    Mat3 c;
    double t = std::pow(2.0, -alpha / 3.0);
    c(0, 0) = t;
    c(0, 1) = -t * alpha / cbrt4;
    c(0, 2) = t * alpha * (alpha + 1.0) / std::pow(2.0, 7.0 / 3.0);
    c(1, 1) = t;
    c(1, 2) = -t * alpha / cbrt4;
    c(2, 2) = t;
    return c;
}

inline Mat3 n_alpha_eval(cplx z, double alpha) {
    if (on_surface_cut(z)) throw std::domain_error("n_alpha_eval: z on a cut");
    WTriple w = w_triple(z);
    Mat3 n0 = n0_eval(z);
    double y = std::imag(z);
    cplx d1 = std::exp(-alpha * surface_log(w.w1, 1, y));
    cplx d2 = std::exp(-alpha * surface_log(w.w2, 2, y));
    cplx d3 = std::exp(alpha * pi * iu) * std::exp(-alpha * surface_log(w.w3, 3, y));
    return c_alpha(alpha) * n0 * Mat3::diag(d1, d2, d3);
}

// ---------------------------------------------------------------------------
// Conformal maps at the branch points.

struct ConformalMaps {
    LambdaParams p;
    double eps0 = 0.25, eps1 = 0.25;
    cplx f(cplx z) const {  // near 0
        LambdaTriple l = lambda_triple(z, p);
        cplx d = (l.l2 - l.l3) / 2.0;
        return d * d;
    }
    cplx ftilde(cplx z) const {  // near 1
        LambdaTriple l = lambda_triple(z, p);
        cplx d = (l.l2 - l.l1) / 2.0;
        return d * d;
    }
};

// winding number of the boundary image around w0 (univalence probe)
inline int winding_number(const std::vector<cplx>& curve, cplx w0) {
    double total = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        cplx a = curve[i] - w0, b = curve[(i + 1) % curve.size()] - w0;
        total += princ_arg(b / a);
    }
    return static_cast<int>(std::lround(total / (2.0 * pi)));
}

inline bool conformal_univalent(const ConformalMaps& maps, bool at_zero, int nsamples = 256) {
    std::vector<cplx> img;
    cplx center = at_zero ? cplx(0.0) : cplx(1.0);
    double eps = at_zero ? maps.eps0 : maps.eps1;
    for (int i = 0; i < nsamples; ++i) {
        double th = -pi + (i + 0.5) * 2.0 * pi / nsamples;
        cplx z = center + eps * std::exp(iu * th);
        img.push_back(at_zero ? maps.f(z) : maps.ftilde(z));
    }
    // interior targets (off the cuts) must be wound exactly once
    for (double frac : {0.1, 0.45}) {
        cplx inner = center + frac * eps * std::exp(iu * pi / 3.0);
        cplx target = at_zero ? maps.f(inner) : maps.ftilde(inner);
        if (std::abs(winding_number(img, target)) != 1) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Local parametrices.

struct LocalParametrix {
    KernelParams params;
    double s;
    LambdaParams lp() const { return {s, params.rho}; }

    Mat3 Ecal(cplx z) const {  // analytic prefactor at 0
        ConformalMaps maps{lp()};
        cplx fv = maps.f(z);
        cplx f14 = cpow(fv, 0.25);
        cplx fa2 = cpow(fv, params.alpha / 2.0);
        double s13 = std::cbrt(s);
        Mat3 mid;
        mid(0, 0) = std::sqrt(2.0);
        mid(1, 1) = -iu * std::sqrt(pi) * s13 * f14;
        mid(1, 2) = 1.0 / (std::sqrt(pi) * s13 * f14);
        mid(2, 1) = std::sqrt(pi) * s13 * f14;
        mid(2, 2) = -iu / (std::sqrt(pi) * s13 * f14);
        return n_alpha_eval(z, params.alpha) * mid * Mat3::diag(1.0, fa2, fa2) *
               (1.0 / std::sqrt(2.0));
    }

    Mat3 Etilde(cplx z) const {  // analytic prefactor at 1
        ConformalMaps maps{lp()};
        cplx fv = maps.ftilde(z);
        cplx f14 = cpow(fv, 0.25);
        double s13 = std::cbrt(s);
        Mat3 mid;
        mid(0, 0) = std::sqrt(pi) * s13 * f14;
        mid(0, 1) = -iu / (std::sqrt(pi) * s13 * f14);
        mid(1, 0) = iu * std::sqrt(pi) * s13 * f14;
        mid(1, 1) = -1.0 / (std::sqrt(pi) * s13 * f14);
        mid(2, 2) = std::sqrt(2.0);
        return n_alpha_eval(z, params.alpha) * mid * (1.0 / std::sqrt(2.0));
    }

    // P^{(0)}: Bessel model of order alpha at argument s^{4/3} f(z)
    Mat3 p0(cplx z) const {
        double a = princ_arg(z);
        BesselRegion reg = BesselRegion::I;
        if (a > 3.0 * pi / 4.0) reg = BesselRegion::II;
        if (a < -3.0 * pi / 4.0) reg = BesselRegion::III;
        ConformalMaps maps{lp()};
        cplx fv = maps.f(z);
        cplx zeta = std::pow(s, 4.0 / 3.0) * fv;
        Mat2 phi = bessel_parametrix(zeta, params.alpha, reg);
        cplx fa2 = cpow(fv, -params.alpha / 2.0);
        LambdaTriple l = lambda_triple(z, lp());
        cplx ex = std::pow(s, 2.0 / 3.0) * (l.l2 - l.l3) / 2.0;
        Mat3 mid;
        mid(0, 0) = 1.0;
        mid(1, 1) = phi(0, 0);
        mid(1, 2) = phi(0, 1);
        mid(2, 1) = phi(1, 0);
        mid(2, 2) = phi(1, 1);
        return Ecal(z) * Mat3::diag(1.0, fa2, fa2) * mid *
               Mat3::diag(1.0, std::exp(-ex), std::exp(ex));
    }

    // P^{(1)}: Bessel model of order 0 at argument s^{4/3} f~(z)
    Mat3 p1(cplx z) const {
        double b = princ_arg(z - 1.0);
        BesselRegion reg = BesselRegion::I;
        if (b > 0.0 && b < pi / 4.0) reg = BesselRegion::III;
        if (b < 0.0 && b > -pi / 4.0) reg = BesselRegion::II;
        ConformalMaps maps{lp()};
        cplx fv = maps.ftilde(z);
        cplx zeta = std::pow(s, 4.0 / 3.0) * fv;
        Mat2 phi = bessel_parametrix(zeta, 0.0, reg);
        LambdaTriple l = lambda_triple(z, lp());
        cplx ex = std::pow(s, 2.0 / 3.0) * (l.l2 - l.l1) / 2.0;
        Mat3 mid;
        mid(0, 0) = phi(0, 1);
        mid(0, 1) = -phi(0, 0);
        mid(1, 0) = phi(1, 1);
        mid(1, 1) = -phi(1, 0);
        mid(2, 2) = 1.0;
        return Etilde(z) * mid * Mat3::diag(std::exp(ex), std::exp(-ex), 1.0);
    }
};

// ---------------------------------------------------------------------------
// Correction matrices of the small-norm step.

inline Mat3 j1_at(cplx z, const KernelParams& kp, double s) {
    ConformalMaps maps{{s, kp.rho}};
    cplx f12 = std::sqrt(maps.f(z));
    Mat3 a;
    double mu = 1.0 + 4.0 * kp.alpha * kp.alpha;
    a(1, 1) = mu;
    a(1, 2) = -2.0 * iu;
    a(2, 1) = -2.0 * iu;
    a(2, 2) = -mu;
    Mat3 n = n_alpha_eval(z, kp.alpha);
    return n * a * n.inverse() * (1.0 / (8.0 * f12));
}

inline Mat3 j1t_at(cplx z, const KernelParams& kp, double s) {
    ConformalMaps maps{{s, kp.rho}};
    cplx f12 = std::sqrt(maps.ftilde(z));
    Mat3 a;
    a(0, 0) = -1.0;
    a(0, 1) = 2.0 * iu;
    a(1, 0) = 2.0 * iu;
    a(1, 1) = 1.0;
    Mat3 n = n_alpha_eval(z, kp.alpha);
    return n * a * n.inverse() * (1.0 / (8.0 * f12));
}

// Closed form for the residue of J1 at 0.  The overall sign corrects the
// printed display: J1 as assembled from def-J01 with the principal branch of
// f^{1/2} (the branch the Bessel asymptotics produce, confirmed by the
// measured matching P0 N^{-1} - I = J1/s^{2/3}) has residue equal to minus
// the printed matrix.  With this sign the quadrature residue, the R1 field
// and the s^{-1} coefficient of dF/ds all cohere.
inline Mat3 res0_j1_closed(const KernelParams& kp, double s) {
    ExpansionCoeffs c = expansion_coeffs({s, kp.rho});
    Mat3 mid;
    mid(2, 1) = -std::pow(3.0, 1.5) * (4.0 * kp.alpha * kp.alpha - 1.0) / (16.0 * std::abs(c.c1));
    const Mat3& ml = n0_left_factor();
    Mat3 ca = c_alpha(kp.alpha);
    return ca * ml * mid * ml.inverse() * ca.inverse();
}

inline Mat3 res0_j1_quadrature(const KernelParams& kp, double s, double radius = 0.12) {
    auto f = [&](cplx zeta, cplx* out) {
        Mat3 j = j1_at(zeta, kp, s);
        for (int i = 0; i < 9; ++i) out[i] = j.a[i];
    };
    ContourPath circle = ContourPath::circle(0.0, radius, -pi, pi);
    cplx vals[9];
    double errs[9];
    detail::integrate_multi(f, 9, circle, 1e-11, vals, errs);
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.a[i] = vals[i] / (2.0 * pi * iu);
    return r;
}

// Laurent data of J~1 at z=1 from a least-squares fit on two circles.
struct LaurentJ1t {
    Mat3 residue, j0, j1;
    double fit_residual;
};

inline LaurentJ1t laurent_j1t(const KernelParams& kp, double s, double r1 = 0.05,
                              double r2 = 0.1) {
    const int npts = 16;
    std::vector<cplx> us;
    std::vector<Mat3> vals;
    for (double r : {r1, r2}) {
        for (int i = 0; i < npts; ++i) {
            double th = -pi + (i + 0.37) * 2.0 * pi / npts;  // avoid the cuts
            cplx u = r * std::exp(iu * th);
            us.push_back(u);
            vals.push_back(j1t_at(1.0 + u, kp, s));
        }
    }
    // per-entry LSQ on {1/u, 1, u, u^2} via complex normal equations
    const int m = static_cast<int>(us.size());
    MatrixC a(4), rhs(4);
    LaurentJ1t out{};
    double resid2 = 0.0, norm2 = 0.0;
    Mat3 coef[4];
    for (int e = 0; e < 9; ++e) {
        std::array<std::vector<cplx>, 4> basis;
        for (int k = 0; k < 4; ++k) basis[k].resize(m);
        for (int i = 0; i < m; ++i) {
            basis[0][i] = 1.0 / us[i];
            basis[1][i] = 1.0;
            basis[2][i] = us[i];
            basis[3][i] = us[i] * us[i];
        }
        for (int p = 0; p < 4; ++p) {
            for (int q = 0; q < 4; ++q) {
                cplx acc(0.0);
                for (int i = 0; i < m; ++i) acc += std::conj(basis[p][i]) * basis[q][i];
                a(p, q) = acc;
            }
            cplx acc(0.0);
            for (int i = 0; i < m; ++i) acc += std::conj(basis[p][i]) * vals[i].a[e];
            rhs(p, 0) = acc;
            rhs(p, 1) = rhs(p, 2) = rhs(p, 3) = 0.0;
        }
        MatrixC x = solve_linear(a, rhs);
        for (int k = 0; k < 4; ++k) coef[k].a[e] = x(k, 0);
        for (int i = 0; i < m; ++i) {
            cplx model = x(0, 0) / us[i] + x(1, 0) + x(2, 0) * us[i] + x(3, 0) * us[i] * us[i];
            resid2 += std::norm(vals[i].a[e] - model);
            norm2 += std::norm(vals[i].a[e]);
        }
    }
    out.residue = coef[0];
    out.j0 = coef[1];
    out.j1 = coef[2];
    out.fit_residual = std::sqrt(resid2 / std::max(norm2, 1e-300));
    return out;
}

// R_1(z) assembled from the residues (def-R1 piecewise form).
struct R1Field {
    Mat3 res0, res1, jcal1;
    KernelParams params;
    double s;
    double eps = 0.25;
    Mat3 operator()(cplx z) const {
        Mat3 v = res0 * (1.0 / z) + res1 * (1.0 / (z - 1.0));
        if (std::abs(z) < eps) v = v - j1_at(z, params, s);
        if (std::abs(z - 1.0) < eps) v = v - j1t_at(z, params, s);
        return v;
    }
    Mat3 deriv_at_1() const { return (jcal1 + res0) * cplx(-1.0); }
};

inline R1Field r1_field(const KernelParams& kp, double s) {
    LaurentJ1t lj = laurent_j1t(kp, s);
    R1Field f;
    f.res0 = res0_j1_closed(kp, s);
    f.res1 = lj.residue;
    f.jcal1 = lj.j1;
    f.params = kp;
    f.s = s;
    return f;
}

// ---------------------------------------------------------------------------
// Closed forms E~(1), E~'(1).

inline Mat3 etilde1_closed(const KernelParams& kp, double s) {
    ExpansionCoeffs c = expansion_coeffs({s, kp.rho});
    double a = kp.alpha;
    double s13 = std::cbrt(s);
    cplx amp = std::pow(3.0, 0.25) * std::sqrt(c.ct1) * std::sqrt(pi) * s13;
    Mat3 m1, m2, m3;
    m1(0, 0) = 2.0;
    m1(1, 0) = -1.0;
    m1(2, 0) = 0.5;
    m2(0, 2) = 0.5;
    m2(1, 2) = 2.0;
    m2(2, 2) = 8.0;
    m3(0, 1) = a - 5.0 / 3.0;
    m3(1, 1) = -a / 2.0 - 2.0 / 3.0;
    m3(2, 1) = a / 4.0 + 13.0 / 12.0;
    Mat3 bracket = m1 * amp - m2 * (std::pow(2.0, a + 0.5) / sqrt3) + m3 * (2.0 * iu / amp);
    return c_alpha(a) * n0_left_factor() * bracket * (1.0 / (9.0 * std::sqrt(2.0)));
}

inline Mat3 etilde1p_closed(const KernelParams& kp, double s) {
    ExpansionCoeffs c = expansion_coeffs({s, kp.rho});
    double a = kp.alpha;
    double s13 = std::cbrt(s);
    double q = c.ct3 / c.ct1;
    cplx amp = std::pow(3.0, 0.25) * std::sqrt(c.ct1) * std::sqrt(pi) * s13;
    Mat3 m1, m2, m3;
    m1(0, 0) = 9.0 * q - a * (3.0 * a - 5.0) - 1.0 / 6.0;
    m1(1, 0) = -4.5 * q + a * (3.0 * a + 13.0) / 2.0 - 35.0 / 12.0;
    m1(2, 0) = 2.25 * q - a * (3.0 * a + 31.0) / 4.0 - 253.0 / 24.0;
    m2(0, 1) = 27.0 * q * (10.0 / 3.0 - 2.0 * a) - 6.0 * a * a * a + 15.0 * a + 1.0;
    m2(1, 1) = 27.0 * q * (4.0 / 3.0 + a) + 3.0 * a * a * a + 27.0 * a * a + 19.5 * a - 14.0;
    m2(2, 1) = -27.0 * q * (13.0 / 6.0 + a / 2.0) -
               (6.0 * a * a * a + 108.0 * a * a + 417.0 * a + 269.0) / 4.0;
    m3(0, 2) = 2.0 * a - 8.0 / 3.0;
    m3(1, 2) = 8.0 * a - 14.0 / 3.0;
    m3(2, 2) = 32.0 * a + 16.0 / 3.0;
    Mat3 bracket = m1 * (amp / 9.0) + m2 * (iu / (54.0 * amp)) +
                   m3 * (std::pow(2.0, a + 0.5) * sqrt3 / 27.0);
    return c_alpha(a) * n0_left_factor() * bracket * (1.0 / (9.0 * std::sqrt(2.0)));
}

// ---------------------------------------------------------------------------
// Local expansions of N_alpha at the branch points (printed partial sums).

inline Mat3 n_alpha_series_at0(cplx z, double alpha) {
    Mat3 sm, s0, sp;
    double t94 = std::pow(3.0, 2.25), t34 = std::pow(3.0, 0.75);
    sm(2, 1) = -iu * t94 / 4.0;
    sm(2, 2) = -t94 / 4.0;
    s0(0, 0) = 1.5 * sqrt3;
    sp(1, 1) = iu * t34 / 2.0;
    sp(1, 2) = -t34 / 2.0;
    // the Szego factors contribute at this order; the display's 3^{7/4}/4 is
    // the alpha = 0 value of 3^{3/4}(3+alpha)/4
    sp(2, 1) = iu * t34 * (3.0 + alpha) / 4.0;
    sp(2, 2) = -t34 * (3.0 + alpha) / 4.0;
    Mat3 bracket = sm * cpow(z, -0.25) + s0 + sp * cpow(z, 0.25);
    cplx za2 = cpow(z, -alpha / 2.0);
    Mat3 right = Mat3::diag(std::pow(2.0 / 3.0, alpha), std::pow(3.0, alpha / 2.0) * za2,
                            std::pow(3.0, alpha / 2.0) * za2);
    return c_alpha(alpha) * n0_left_factor() * bracket * right * (1.0 / 9.0);
}

inline Mat3 n_alpha_series_at1(cplx z, double alpha) {
    // valid as printed for Im z > 0
    cplx u = z - 1.0;
    cplx e4 = std::exp(iu * pi / 4.0);
    double a = alpha;
    Mat3 tm, t0, t1, t2, t3, t4;
    tm(0, 0) = 1.0;  tm(0, 1) = -iu;
    tm(1, 0) = -0.5; tm(1, 1) = iu * 0.5;
    tm(2, 0) = 0.25; tm(2, 1) = -iu * 0.25;
    t0(0, 2) = 0.5;
    t0(1, 2) = 2.0;
    t0(2, 2) = 8.0;
    t1(0, 0) = iu * (a - 5.0 / 3.0);        t1(0, 1) = -(a - 5.0 / 3.0);
    t1(1, 0) = -iu * (a / 2.0 + 2.0 / 3.0); t1(1, 1) = a / 2.0 + 2.0 / 3.0;
    t1(2, 0) = iu * (a / 4.0 + 13.0 / 12.0); t1(2, 1) = -(a / 4.0 + 13.0 / 12.0);
    {
        // first row carries (3a-5), matching the E~'(1) display; the (3a+5)
        // in the local-expansion display is a slip
        double r0 = -a * (3.0 * a - 5.0) / 2.0 - 1.0 / 12.0;
        double r1v = a * (3.0 * a + 13.0) / 4.0 - 35.0 / 24.0;
        double r2 = -a * (3.0 * a + 31.0) / 8.0 - 253.0 / 48.0;
        // the second column is -i times the first throughout this block (the
        // printed first row breaks the alternating pattern; measured -i)
        t2(0, 0) = r0;  t2(0, 1) = -iu * r0;
        t2(1, 0) = r1v; t2(1, 1) = -iu * r1v;
        t2(2, 0) = r2;  t2(2, 1) = -iu * r2;
    }
    t3(0, 2) = 2.0 * a - 8.0 / 3.0;
    t3(1, 2) = 8.0 * a - 14.0 / 3.0;
    t3(2, 2) = 32.0 * a + 16.0 / 3.0;
    {
        double r0 = -(3.0 * a * a * a - 7.5 * a - 0.5);
        double r1v = 1.5 * a * a * a + 13.5 * a * a + 9.75 * a - 7.0;
        double r2 = -(6.0 * a * a * a + 108.0 * a * a + 417.0 * a + 269.0) / 8.0;
        t4(0, 0) = iu * r0;  t4(0, 1) = -r0;
        t4(1, 0) = iu * r1v; t4(1, 1) = -r1v;
        t4(2, 0) = iu * r2;  t4(2, 1) = -r2;
    }
    Mat3 bracket = tm * (std::pow(3.0, 0.25) * e4 * cpow(u, -0.25)) -
                   t0 * (std::pow(2.0, a) / sqrt3) +
                   t1 * (std::pow(3.0, -0.25) * e4 * cpow(u, 0.25)) +
                   t2 * (std::pow(3.0, 0.25) / 9.0 * e4 * cpow(u, 0.75)) +
                   t3 * (std::pow(2.0, a) / (9.0 * sqrt3) * u) +
                   t4 * (std::pow(3.0, -0.25) / 54.0 * e4 * cpow(u, 1.25));
    return c_alpha(a) * n0_left_factor() * bracket * (1.0 / 9.0);
}

// ---------------------------------------------------------------------------
// Derivative of F from the RH closed forms.

struct DfdsTerms {
    cplx term1, term2, term3;  // the three (2,1)-entry limits
};

// The (4 alpha^2 - 1) piece carries the corrected residue sign; the printed
// version (positive) traces back to the res-J1 display and is contradicted at
// four digits by the measured s^{-1} coefficient of dF/ds.
inline DfdsTerms dfds_terms(const KernelParams& kp, double s) {
    ExpansionCoeffs c = expansion_coeffs({s, kp.rho});
    double a = kp.alpha;
    DfdsTerms t;
    t.term1 = iu * pi *
              (-(4.0 * a * a - 1.0) * c.ct1 / (24.0 * std::abs(c.c1)) +
               3.0 * c.ct3 / (8.0 * c.ct1) + (8.0 * a * a + 1.0) / 48.0);
    t.term2 = -iu * sqrt3 * a * pi * c.ct1 / 3.0 * std::pow(s, 2.0 / 3.0);
    t.term3 = iu * pi * c.ct1 * c.ct1 / 2.0 * std::pow(s, 4.0 / 3.0);
    return t;
}

// Log-derivative coefficient of the determinant.  The corrected residue
// chain collapses the s^{-1} bracket to 1/9 independently of alpha, i.e. the
// coefficient is -1/18; the Fredholm data at alpha=0 measures -0.05560(5).
inline constexpr double dfds_log_coefficient = -1.0 / 18.0;
inline constexpr double dfds_log_coefficient_printed(double alpha) {
    return -(12.0 * alpha * alpha + 1.0) / 72.0;
}

// Five-coefficient expansion of dF/ds assembled from the closed forms.
inline double dfds_from_rh(double s, const KernelParams& kp, bool printed_log = false) {
    double a = kp.alpha, r = kp.rho;
    double s13 = std::cbrt(s);
    double c_lead = -3.0 / std::pow(2.0, 8.0 / 3.0);
    double c_const = r / 2.0;
    double c_m13 = (3.0 * a - r * r) / (3.0 * std::pow(2.0, 4.0 / 3.0));
    double c_m23 = -a * r / (3.0 * cbrt4);
    double c_m1 = printed_log ? dfds_log_coefficient_printed(a) : dfds_log_coefficient;
    return c_lead * s13 + c_const + c_m13 / s13 + c_m23 / (s13 * s13) + c_m1 / s;
}

// Literal assembly -(1/(2 pi i s)) (term1 + term2 + term3); differs from
// dfds_from_rh by the rho/s^{1/3} mixing inside the closed forms, which is
// beyond the printed order.
inline double dfds_literal(double s, const KernelParams& kp) {
    DfdsTerms t = dfds_terms(kp, s);
    cplx v = -(t.term1 + t.term2 + t.term3) / (2.0 * pi * iu * s);
    return std::real(v);
}

}  // namespace pearcey
