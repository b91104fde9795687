#pragma once

// The three-sheeted Riemann surface behind the steepest-descent analysis:
// eta, the Cardano solutions w_j of w^3 - (3/2) w^2 + z/2 = 0, the phase
// functions lambda_j, their truncated expansions at 0, 1 and infinity, and the
// contour sign estimates that the small-norm argument rests on.

#include "pearcey/core.hpp"
#include "pearcey/richardson.hpp"

namespace pearcey {

// A point on one of the three sheets; the sheet's own cut is excluded.
struct SheetPoint {
    int sheet;  // 1, 2 or 3
    cplx z;
    void validate() const {
        if (sheet < 1 || sheet > 3) throw std::invalid_argument("SheetPoint: sheet in 1..3");
        bool on_left = std::imag(z) == 0.0 && std::real(z) <= 0.0;
        bool on_right = std::imag(z) == 0.0 && std::real(z) >= 1.0;
        if ((sheet == 1 && on_right) || (sheet == 3 && on_left) ||
            (sheet == 2 && (on_left || on_right)))
            throw std::domain_error("SheetPoint: z on the sheet's cut");
    }
};

struct LambdaParams {
    double s;
    double rho;
    void validate() const {
        if (!(s > 0.0)) throw std::invalid_argument("LambdaParams: s must be > 0");
    }
};

inline bool on_surface_cut(cplx z) {
    return std::imag(z) == 0.0 && (std::real(z) <= 0.0 || std::real(z) >= 1.0);
}

// eta = 2 sqrt(z(z-1)) + 1 - 2z with the square-root sign fixed by
// arg eta in (0, pi), i.e. Im eta > 0 off the cuts.  The two sign choices
// multiply to 1, so the small root is formed as the reciprocal of the large
// one; the direct difference cancels catastrophically for large |z|.
inline cplx eta(cplx z) {
    if (on_surface_cut(z))
        throw std::domain_error("eta: z on a cut; use a boundary-value helper");
    cplx a = 2.0 * std::sqrt(z * (z - 1.0));
    cplx b = 1.0 - 2.0 * z;
    cplx big = (std::abs(a + b) >= std::abs(b - a)) ? (a + b) : (b - a);
    cplx small = 1.0 / big;
    return std::imag(big) > 0.0 ? big : small;
}

struct WTriple {
    cplx w1, w2, w3;
    cplx operator[](int j) const {  // 1-based sheet index
        switch (j) {
            case 1: return w1;
            case 2: return w2;
            default: return w3;
        }
    }
};

// Cube roots taken with arg(eta^{1/3}) = arg(eta)/3 in (0, pi/3); this keeps
// every w_j single-valued on its sheet and reproduces the limits
// w(0) = {3/2, 0, 0} and w(1) = {1, 1, -1/2}.
inline WTriple w_triple(cplx z) {
    cplx e = eta(z);
    cplx u = std::exp(std::log(e) / 3.0);  // principal log: arg in (0,pi) -> arg/3
    cplx v = 1.0 / u;
    WTriple w;
    w.w1 = 0.5 * (u + v + 1.0);
    w.w2 = 0.5 * (omega2 * u + omega * v + 1.0);
    w.w3 = 0.5 * (omega * u + omega2 * v + 1.0);
    return w;
}

// delta-extrapolated boundary values on the cuts (-inf,0) and (1,inf).
// side = +1 for the limit from above, -1 from below.
inline WTriple w_boundary(double x, int side) {
    if (!(x < 0.0 || x > 1.0))
        throw std::invalid_argument("w_boundary: x must lie on (-inf,0) or (1,inf)");
    const double deltas[3] = {1e-5, 5e-6, 2.5e-6};
    double scale = std::min(std::abs(x), std::abs(x - 1.0));
    std::vector<std::pair<double, cplx>> s1, s2, s3;
    for (double d : deltas) {
        double dd = d * std::max(1.0, std::abs(x));
        WTriple w = w_triple(cplx(x, side >= 0 ? dd : -dd));
        s1.push_back({dd, w.w1});
        s2.push_back({dd, w.w2});
        s3.push_back({dd, w.w3});
    }
    double order = (scale < 1e-3) ? 0.5 : 1.0;  // square-root behavior at branch points
    WTriple w;
    w.w1 = extrapolate_to_zero(s1, order).value;
    w.w2 = extrapolate_to_zero(s2, order).value;
    w.w3 = extrapolate_to_zero(s3, order).value;
    return w;
}

struct LambdaTriple {
    cplx l1, l2, l3;
    cplx operator[](int j) const {
        switch (j) {
            case 1: return l1;
            case 2: return l2;
            default: return l3;
        }
    }
};

inline cplx lambda_of_w(cplx w, const LambdaParams& p) {
    double s13 = std::cbrt(p.s);
    return (3.0 / cbrt2) * w * w - (3.0 / cbrt2 + cbrt2 * p.rho / s13) * w -
           3.0 / std::pow(2.0, 7.0 / 3.0) + p.rho / (cbrt4 * s13);
}

inline LambdaTriple lambda_triple(cplx z, const LambdaParams& p) {
    p.validate();
    WTriple w = w_triple(z);
    return {lambda_of_w(w.w1, p), lambda_of_w(w.w2, p), lambda_of_w(w.w3, p)};
}

// s-independent part of lambda_j; lambda_j == lambda*_j when rho = 0.
inline cplx lambda_star_of_w(cplx w) {
    return (3.0 / cbrt2) * w * w - (3.0 / cbrt2) * w - 3.0 / std::pow(2.0, 7.0 / 3.0);
}

inline cplx lambda_star(cplx z, int j) {
    return lambda_star_of_w(w_triple(z)[j]);
}

inline cplx w_at(const SheetPoint& p) {
    p.validate();
    if (on_surface_cut(p.z)) {
        // the point sits on the other sheets' cut, where this sheet is
        // analytic; both one-sided limits agree there
        return w_boundary(std::real(p.z), +1)[p.sheet];
    }
    return w_triple(p.z)[p.sheet];
}

// Closed-form expansion coefficients of Prop. 3.2.
struct ExpansionCoeffs {
    double d1, d2;
    double c0, c1, c2, c3;      // at z = 0
    double ct0, ct1, ct2, ct3;  // at z = 1
};

inline ExpansionCoeffs expansion_coeffs(const LambdaParams& p) {
    p.validate();
    double s13 = std::cbrt(p.s);
    double r = p.rho / s13;
    ExpansionCoeffs c;
    c.d1 = -0.5 + r / std::pow(2.0, 4.0 / 3.0);
    c.d2 = 3.0 / std::pow(2.0, 11.0 / 3.0) - r / 6.0;
    c.c0 = -3.0 / std::pow(2.0, 7.0 / 3.0) + r / cbrt4;
    c.c1 = -sqrt3 / cbrt2 - cbrt2 * r / sqrt3;
    c.c2 = cbrt4 / 3.0 - cbrt2 * r / 9.0;
    c.c3 = 7.0 * cbrt4 / (36.0 * sqrt3) - 5.0 * cbrt2 * r / (54.0 * sqrt3);
    c.ct0 = -3.0 / std::pow(2.0, 7.0 / 3.0) - r / cbrt4;
    c.ct1 = sqrt3 / cbrt2 - cbrt2 * r / sqrt3;
    c.ct2 = cbrt4 / 3.0 + cbrt2 * r / 9.0;
    c.ct3 = 7.0 * cbrt4 / (36.0 * sqrt3) + 5.0 * cbrt2 * r / (54.0 * sqrt3);
    return c;
}

// theta_k(z; rho) = (3/2) omega^{2k} z^{2/3} + rho omega^k z^{1/3}
inline cplx theta_k(int k, cplx z, double rho) {
    cplx w1 = (k % 3 == 0) ? cplx(1.0) : (k % 3 == 1 ? omega : omega2);
    cplx w2 = (2 * k % 3 == 0) ? cplx(1.0) : (2 * k % 3 == 1 ? omega : omega2);
    return 1.5 * w2 * cpow(z, 2.0 / 3.0) + rho * w1 * cpow(z, 1.0 / 3.0);
}

// |lambda_j(z) - s^{-2/3} theta_{sigma(j)}(s z)| with the half-plane
// permutation sigma: identity above the axis, (1 2) swap below.
inline double theta_match(cplx z, const LambdaParams& p, int j) {
    if (std::abs(z) < 1e2) throw std::invalid_argument("theta_match: need |z| >= 100");
    bool upper = std::imag(z) >= 0.0;
    int sigma = j;
    if (!upper && j == 1) sigma = 2;
    if (!upper && j == 2) sigma = 1;
    cplx lam = lambda_triple(z, p)[j];
    cplx th = theta_k(sigma, p.s * z, p.rho) / std::pow(p.s, 2.0 / 3.0);
    return std::abs(lam - th);
}

// ---------------------------------------------------------------------------
// Truncated series of Prop. 3.1 / 3.2 and the residual-order report.

enum class SeriesLocation { Zero, One, Infinity };
enum class SeriesObject { W, Lambda };

namespace detail {

inline cplx w_series(SeriesLocation loc, int sheet, bool upper, cplx z) {
    const double t13 = 1.0 / cbrt2;            // 2^{-1/3}
    const double t53 = 1.0 / (2.0 * cbrt4);    // 2^{-5/3}
    if (loc == SeriesLocation::Infinity) {
        cplx z13 = cpow(z, 1.0 / 3.0);
        if (sheet == 3)
            return -t13 * z13 + 0.5 - t53 / z13 + 1.0 / (6.0 * cbrt2) / (z13 * z13) -
                   1.0 / (6.0 * 2.0 * cbrt4) / (z13 * z13 * z13 * z13);
        if (sheet == 2) {
            cplx a = upper ? omega2 : omega;
            cplx b = upper ? omega : omega2;
            return -t13 * a * z13 + 0.5 - b * t53 / z13 + a / (6.0 * cbrt2) / (z13 * z13) -
                   b / (6.0 * 2.0 * cbrt4) / (z13 * z13 * z13 * z13);
        }
        throw std::invalid_argument("w_series: no printed series for this sheet at infinity");
    }
    if (loc == SeriesLocation::Zero) {
        cplx z12 = std::sqrt(z);
        double sgn = (sheet == 2) ? 1.0 : -1.0;
        if (sheet != 2 && sheet != 3)
            throw std::invalid_argument("w_series: sheets 2,3 only at z=0");
        // the z^2 coefficient 8/243 follows from the cubic; adding it makes
        // the remainder O(z^{5/2}), the order the surrounding analysis uses
        return sgn * (sqrt3 / 3.0) * z12 + z / 9.0 + sgn * (5.0 * sqrt3 / 162.0) * z12 * z12 * z12 +
               (8.0 / 243.0) * z * z;
    }
    // location 1, sheets 1 and 2
    if (sheet != 1 && sheet != 2)
        throw std::invalid_argument("w_series: sheets 1,2 only at z=1");
    cplx u = z - 1.0;
    cplx u12 = std::sqrt(u);
    double sgn = (sheet == 1) ? -1.0 : 1.0;  // upper half-plane signs
    if (!upper) sgn = -sgn;
    return 1.0 + sgn * (iu / sqrt3) * u12 + u / 9.0 - sgn * (5.0 * sqrt3 * iu / 162.0) * u12 * u12 * u12 -
           (8.0 / 243.0) * u * u;
}

inline cplx lambda_series(SeriesLocation loc, int sheet, bool upper, cplx z,
                          const LambdaParams& p) {
    ExpansionCoeffs c = expansion_coeffs(p);
    double s13 = std::cbrt(p.s);
    if (loc == SeriesLocation::Infinity) {
        cplx z13 = cpow(z, 1.0 / 3.0);
        cplx z23 = z13 * z13;
        if (sheet == 3) return 1.5 * z23 + (p.rho / s13) * z13 + c.d1 / z13 + c.d2 / z23;
        if (sheet == 2) {
            cplx a = upper ? omega : omega2;
            cplx b = upper ? omega2 : omega;
            return 1.5 * a * z23 + (p.rho * b / s13) * z13 + a * c.d1 / z13 + b * c.d2 / z23;
        }
        throw std::invalid_argument("lambda_series: no printed series for sheet 1 at infinity");
    }
    if (loc == SeriesLocation::Zero) {
        if (sheet != 2 && sheet != 3)
            throw std::invalid_argument("lambda_series: sheets 2,3 only at z=0");
        cplx z12 = std::sqrt(z);
        double sgn = (sheet == 2) ? 1.0 : -1.0;
        return c.c0 + sgn * c.c1 * z12 + c.c2 * z + sgn * c.c3 * z12 * z12 * z12;
    }
    if (sheet != 1 && sheet != 2)
        throw std::invalid_argument("lambda_series: sheets 1,2 only at z=1");
    cplx u = z - 1.0;
    cplx u12 = std::sqrt(u);
    double sgn = (sheet == 1) ? -1.0 : 1.0;
    if (!upper) sgn = -sgn;
    // the linear coefficient is -(A+B)/9 = -ct2; it cancels from every
    // difference lambda_2 - lambda_1 the analysis consumes
    return c.ct0 + sgn * iu * c.ct1 * u12 - c.ct2 * u + sgn * iu * c.ct3 * u12 * u12 * u12;
}

}  // namespace detail

struct SeriesReport {
    double max_residual;
    double radius;
};

// Max |exact - truncated series| over a 16-point arc at the given radius,
// restricted to the requested half-plane.
inline SeriesReport check_series(SeriesLocation loc, SeriesObject obj, int sheet, bool upper,
                                 double radius, const LambdaParams& p = {1.0, 0.0}) {
    cplx center = (loc == SeriesLocation::One) ? cplx(1.0) : cplx(0.0);
    double res = 0.0;
    for (int i = 0; i < 16; ++i) {
        double th = (i + 0.5) * pi / 16.0;
        if (!upper) th = -th;
        cplx z = center + radius * std::exp(iu * th);
        cplx exact, series;
        if (obj == SeriesObject::W) {
            exact = w_triple(z)[sheet];
            series = detail::w_series(loc, sheet, upper, z);
        } else {
            exact = lambda_triple(z, p)[sheet];
            series = detail::lambda_series(loc, sheet, upper, z, p);
        }
        res = std::max(res, std::abs(exact - series));
    }
    return {res, radius};
}

// Observed decay order between two radii: residual ~ radius^order near 0/1,
// radius^{-order} at infinity.
inline double series_order(SeriesLocation loc, SeriesObject obj, int sheet, bool upper, double r1,
                           double r2, const LambdaParams& p = {1.0, 0.0}) {
    double e1 = check_series(loc, obj, sheet, upper, r1, p).max_residual;
    double e2 = check_series(loc, obj, sheet, upper, r2, p).max_residual;
    double slope = std::log(e1 / e2) / std::log(r1 / r2);
    return (loc == SeriesLocation::Infinity) ? -slope : slope;
}

// ---------------------------------------------------------------------------
// Contour sign estimates of Prop. 3.4 / Cor. 3.5.

struct SignScanResult {
    double min_margin;   // inf over samples of -Re(dlambda)/|z|^{2/3}
    double c_estimate;   // same thing, the constant of the proposition
    std::size_t samples;
};

enum class SignContour { EdgeOne, EdgeZero };  // Sigma_1^(1) u Sigma_5^(1) / Sigma_2 u Sigma_4

inline SignScanResult sign_bounds_scan(const LambdaParams& p, SignContour which, double eps,
                                       bool use_lambda_star = false) {
    if (!(p.s >= 4.0)) throw std::invalid_argument("sign_bounds_scan: need s >= 4");
    if (!(eps > 0.0 && eps < 0.25 + 1e-15))
        throw std::invalid_argument("sign_bounds_scan: eps in (0, 1/4]");
    const int n = 200;
    const double rmax = 1e3;
    double margin = std::numeric_limits<double>::infinity();
    std::size_t count = 0;
    for (int i = 0; i < n; ++i) {
        double r = eps * std::pow(rmax / eps, i / double(n - 1));
        for (int sgn : {+1, -1}) {
            cplx z;
            cplx dlam;
            if (which == SignContour::EdgeOne) {
                z = 1.0 + r * std::exp(iu * (sgn * pi / 4.0));
                if (use_lambda_star)
                    dlam = lambda_star(z, 2) - lambda_star(z, 1);
                else {
                    LambdaTriple l = lambda_triple(z, p);
                    dlam = l.l2 - l.l1;
                }
            } else {
                z = r * std::exp(iu * (sgn * 3.0 * pi / 4.0));
                if (use_lambda_star)
                    dlam = lambda_star(z, 2) - lambda_star(z, 3);
                else {
                    LambdaTriple l = lambda_triple(z, p);
                    dlam = l.l2 - l.l3;
                }
            }
            double re = std::real(dlam);
            if (re >= 0.0)
                throw numerical_error("sign_bounds_scan: nonnegative sample at z=(" +
                                      std::to_string(std::real(z)) + "," +
                                      std::to_string(std::imag(z)) + ")");
            margin = std::min(margin, -re / std::pow(std::abs(z), 2.0 / 3.0));
            ++count;
        }
    }
    return {margin, margin, count};
}

}  // namespace pearcey
