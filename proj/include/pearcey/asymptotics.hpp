#pragma once

// Large-gap expansion of the log-determinant, least-squares extraction of the
// undetermined constant, and the hard-edge emptiness exponent check.

#include "pearcey/parametrix.hpp"

namespace pearcey {

// The expansion coefficients of F(s).  The log coefficient defaults to the
// corrected value -1/18 (see dfds_log_coefficient); the printed
// -(12 alpha^2+1)/72 remains available for diagnostics.
struct Theorem1Coeffs {
    double lead;      // s^{4/3}
    double linear;    // s
    double s23;       // s^{2/3}
    double s13;       // s^{1/3}
    double log_coef;  // ln s
    double constant_part(double C, double alpha, double rho) const {
        return rho * rho * rho * rho / 108.0 + alpha * rho * rho / 6.0 + C;
    }
};

inline Theorem1Coeffs theorem1_coeffs(const KernelParams& kp, bool printed_log = false) {
    Theorem1Coeffs c;
    double a = kp.alpha, r = kp.rho;
    c.lead = -9.0 / std::pow(2.0, 14.0 / 3.0);
    c.linear = r / 2.0;
    c.s23 = (3.0 * a - r * r) / std::pow(2.0, 7.0 / 3.0);
    c.s13 = -a * r / cbrt4;
    c.log_coef = printed_log ? dfds_log_coefficient_printed(a) : dfds_log_coefficient;
    return c;
}

inline double theorem1_eval(double s, const KernelParams& kp, double C,
                            bool printed_log = false) {
    if (!(s > 0.0)) throw std::invalid_argument("theorem1_eval: s > 0");
    Theorem1Coeffs c = theorem1_coeffs(kp, printed_log);
    double s13 = std::cbrt(s);
    return c.lead * s13 * s13 * s13 * s13 + c.linear * s + c.s23 * s13 * s13 + c.s13 * s13 +
           c.log_coef * std::log(s) + c.constant_part(C, kp.alpha, kp.rho);
}

// all terms except the constant part (what the fit subtracts)
inline double theorem1_nonconstant(double s, const KernelParams& kp, bool printed_log = false) {
    Theorem1Coeffs c = theorem1_coeffs(kp, printed_log);
    double s13 = std::cbrt(s);
    return c.lead * s13 * s13 * s13 * s13 + c.linear * s + c.s23 * s13 * s13 + c.s13 * s13 +
           c.log_coef * std::log(s);
}

inline double dfdrho_expansion(double s, const KernelParams& kp) {
    if (!(s > 0.0)) throw std::invalid_argument("dfdrho_expansion: s > 0");
    double a = kp.alpha, r = kp.rho;
    return s / 2.0 - r / std::pow(2.0, 4.0 / 3.0) * std::pow(s, 2.0 / 3.0) -
           a / cbrt4 * std::cbrt(s) + r * (r * r + 9.0 * a) / 27.0;
}

struct FitResult {
    double c_hat;        // recovered constant
    double a_hat;        // amplitude of the s^{-1/3} nuisance term
    double log_hat;      // recovered log coefficient (diagnostic mode only)
    double c_err;        // standard error of c_hat
    double rms_residual;
    std::vector<double> residuals;
    bool log_freed;
};

// Least squares of F_num - (non-constant terms) against C + a s^{-1/3}, with
// the rho-even constant part rho^4/108 + alpha rho^2/6 removed so that c_hat
// estimates the rho-independent constant directly.  Diagnostic mode frees the
// log coefficient as a third parameter.
inline FitResult fit_constant(const std::vector<std::pair<double, double>>& points,
                              const KernelParams& kp, bool free_log = false,
                              bool printed_log = false) {
    if (points.size() < (free_log ? 4u : 3u))
        throw std::invalid_argument("fit_constant: not enough points");
    double smin = points.front().first, smax = points.front().first;
    for (auto& [s, f] : points) {
        smin = std::min(smin, s);
        smax = std::max(smax, s);
    }
    if (smax < 2.5 * smin)
        throw std::invalid_argument("fit_constant: s-range must span a factor 2.5");

    const int m = static_cast<int>(points.size());
    const int n = free_log ? 3 : 2;
    std::vector<double> y(m);
    MatrixC X(std::max(m, n));  // use complex solver on the normal equations
    std::vector<std::array<double, 3>> basis(m);
    Theorem1Coeffs tc = theorem1_coeffs(kp, printed_log);
    for (int i = 0; i < m; ++i) {
        double s = points[i].first;
        double s13 = std::cbrt(s);
        double known = tc.lead * s13 * s13 * s13 * s13 + tc.linear * s + tc.s23 * s13 * s13 +
                       tc.s13 * s13 + (free_log ? 0.0 : tc.log_coef * std::log(s));
        y[i] = points[i].second - known -
               (kp.rho * kp.rho * kp.rho * kp.rho / 108.0 + kp.alpha * kp.rho * kp.rho / 6.0);
        basis[i] = {1.0, 1.0 / s13, free_log ? std::log(s) : 0.0};
    }
    // normal equations
    MatrixC ata(n), atb(n);
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            double acc = 0.0;
            for (int i = 0; i < m; ++i) acc += basis[i][p] * basis[i][q];
            ata(p, q) = acc;
        }
        double acc = 0.0;
        for (int i = 0; i < m; ++i) acc += basis[i][p] * y[i];
        atb(p, 0) = acc;
    }
    MatrixC sol = solve_linear(ata, atb);
    FitResult r;
    r.c_hat = std::real(sol(0, 0));
    r.a_hat = std::real(sol(1, 0));
    r.log_hat = free_log ? std::real(sol(2, 0)) : tc.log_coef;
    r.log_freed = free_log;
    double ss = 0.0;
    r.residuals.resize(m);
    for (int i = 0; i < m; ++i) {
        double model = r.c_hat + r.a_hat * basis[i][1] + (free_log ? r.log_hat * basis[i][2] : 0.0);
        r.residuals[i] = y[i] - model;
        ss += r.residuals[i] * r.residuals[i];
    }
    r.rms_residual = std::sqrt(ss / m);
    int dof = std::max(1, m - n);
    double sigma2 = ss / dof;
    MatrixC inv = solve_linear(ata, MatrixC::identity(n));
    r.c_err = std::sqrt(std::max(0.0, sigma2 * std::real(inv(0, 0))));
    return r;
}

// Slope of ln(-F) against ln s after removing the known sub-leading terms.
// On real data the fitted constant and nuisance amplitude should be passed
// back in (they are "known" once fit_constant has run); synthetic checks use
// the defaults.
inline double fcet_exponent(const std::vector<std::pair<double, double>>& points,
                            const KernelParams& kp, double C = 0.0, double a_nuisance = 0.0,
                            bool subtract_log = false) {
    if (points.size() < 3) throw std::invalid_argument("fcet_exponent: need >= 3 points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    Theorem1Coeffs tc = theorem1_coeffs(kp);
    for (auto& [s, f] : points) {
        double s13 = std::cbrt(s);
        double sub = tc.linear * s + tc.s23 * s13 * s13 + tc.s13 * s13 + a_nuisance / s13 +
                     (subtract_log ? tc.log_coef * std::log(s) +
                                         tc.constant_part(C, kp.alpha, kp.rho)
                                   : 0.0);
        double lead = f - sub;  // ~ lead coefficient * s^{4/3}
        if (!(lead < 0.0)) throw numerical_error("fcet_exponent: non-negative leading part");
        double x = std::log(s), yv = std::log(-lead);
        sx += x;
        sy += yv;
        sxx += x * x;
        sxy += x * yv;
        ++m;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace pearcey
