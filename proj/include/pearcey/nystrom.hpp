#pragma once

// Nystrom discretization of the integral operator on (0,s): Gauss-Legendre
// nodes mapped affinely, square-root symmetrized matrix
// Khat_ij = sqrt(w_i w_j) K(x_i, x_j), log-determinant by LU, and the
// resolvent quantities feeding Y_1 = int F h^T.

#include "pearcey/kernel.hpp"
#include "pearcey/linalg.hpp"
#include "pearcey/quadrature.hpp"

namespace pearcey {

struct NystromSystem {
    double s;
    int m;
    KernelParams params;
    std::vector<double> nodes, weights;
    std::vector<PsiTildeFrame> frames;
    MatrixC khat;        // real-valued entries stored complex
    double trace = 0.0;  // sum w_i K(x_i, x_i)
};

inline NystromSystem build_nystrom(double s, int m, const KernelParams& kp,
                                   unsigned threads = 0) {
    if (!(s > 0.0)) throw std::invalid_argument("build_nystrom: s > 0 required");
    if (m < 8) throw std::invalid_argument("build_nystrom: m >= 8 required");
    kp.validate();
    NystromSystem sys;
    sys.s = s;
    sys.m = m;
    sys.params = kp;
    const QuadratureRule& rule = gauss_legendre(m);
    sys.nodes.resize(m);
    sys.weights.resize(m);
    for (int i = 0; i < m; ++i) {
        sys.nodes[i] = 0.5 * s * (rule.nodes[i] + 1.0);
        sys.weights[i] = 0.5 * s * rule.weights[i];
    }
    sys.frames.resize(m);
    std::exception_ptr err;
    std::mutex err_mtx;
    parallel_for(
        m,
        [&](std::size_t i) {
            try {
                sys.frames[i] = psi_tilde(sys.nodes[i], kp);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mtx);
                if (!err) err = std::current_exception();
            }
        },
        threads);
    if (err) std::rethrow_exception(err);

    sys.khat = MatrixC(m);
    std::vector<double> diag(m);
    parallel_for(
        m,
        [&](std::size_t i) {
            diag[i] = kernel_diag_frame(sys.frames[i]);
            Mat3 inv = sys.frames[i].M.inverse();
            for (int j = 0; j < m; ++j) {
                if (static_cast<int>(i) == j) continue;
                cplx e(0.0);
                for (int k = 0; k < 3; ++k) e += inv(1, k) * sys.frames[j].M(k, 0);
                cplx v = e / (2.0 * pi * iu * (sys.nodes[j] - sys.nodes[i]));
                // K(x_j, x_i): row of Psi~(x_i)^{-1}, column of Psi~(x_j)
                sys.khat(j, i) = std::sqrt(sys.weights[i] * sys.weights[j]) * std::real(v);
            }
        },
        threads);
    sys.trace = 0.0;
    for (int i = 0; i < m; ++i) {
        sys.khat(i, i) = sys.weights[i] * diag[i];
        sys.trace += sys.weights[i] * diag[i];
    }
    return sys;
}

struct GapResult {
    double F;
    int m_used;
    double est_error;
    double trace;
    double im_leakage;
};

inline double logdet_gap(const NystromSystem& sys, double gamma = 1.0) {
    MatrixC a(sys.m);
    for (int i = 0; i < sys.m; ++i)
        for (int j = 0; j < sys.m; ++j) a(i, j) = (i == j ? 1.0 : 0.0) - gamma * sys.khat(i, j);
    cplx ld = logdet(a);
    if (std::abs(std::imag(ld)) > 1e-6)
        throw numerical_error("gap_log_prob: det(I - K) not positive (eigenvalue >= 1?)");
    return std::real(ld);
}

inline GapResult gap_log_prob(double s, const KernelParams& kp, double tol = 1e-8,
                              double gamma = 1.0, unsigned threads = 0, int m_max = 512) {
    if (!(s > 0.0)) throw std::invalid_argument("gap_log_prob: s > 0");
    if (s > 30.0) throw std::invalid_argument("gap_log_prob: s above documented range (30)");
    GapResult res{};
    double prev = 0.0;
    bool have_prev = false;
    for (int m = 32; m <= m_max; m *= 2) {
        NystromSystem sys = build_nystrom(s, m, kp, threads);
        double f = logdet_gap(sys, gamma);
        res.F = f;
        res.m_used = m;
        res.trace = sys.trace;
        if (have_prev) {
            res.est_error = std::abs(f - prev);
            if (res.est_error < tol) return res;
        }
        prev = f;
        have_prev = true;
    }
    if (res.est_error >= tol && res.est_error > 1e-6)
        throw numerical_error("gap_log_prob: node-doubling did not converge, est_error=" +
                              std::to_string(res.est_error));
    return res;
}

struct ResolventMoment {
    Mat3 y1;              // sum_i w_i F(x_i) h(x_i)^T
    double y1_31;         // real part of the (3,1) entry
    double im_leakage;
};

inline ResolventMoment resolvent_y1(const NystromSystem& sys) {
    const int m = sys.m;
    MatrixC a(m), rhs(m);
    // columns 0..2: sqrt(w) f components; solve (I - Khat) Ftilde = ftilde
    std::vector<std::array<cplx, 3>> h(m);
    for (int i = 0; i < m; ++i) {
        FHVectors v = fh_vectors_from_frame(sys.frames[i]);
        double sw = std::sqrt(sys.weights[i]);
        for (int c = 0; c < 3; ++c) {
            rhs(i, c) = sw * v.f[c];
            h[i][c] = sw * v.h[c];
        }
        for (int j = 0; j < m; ++j) a(i, j) = (i == j ? 1.0 : 0.0) - sys.khat(i, j);
    }
    MatrixC ft = solve_linear(a, rhs);
    ResolventMoment r{};
    for (int i = 0; i < m; ++i)
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) r.y1(p, q) += ft(i, p) * h[i][q];
    r.y1_31 = std::real(r.y1(2, 0));
    r.im_leakage = std::abs(std::imag(r.y1(2, 0)));
    return r;
}

inline ResolventMoment resolvent_y1(double s, const KernelParams& kp, int m = 128,
                                    unsigned threads = 0) {
    NystromSystem sys = build_nystrom(s, m, kp, threads);
    return resolvent_y1(sys);
}

enum class DVar { S, Rho };

struct DerivResult {
    double value;
    double est_error;
};

// Central difference with one Richardson halving step.
inline DerivResult dF(double s, const KernelParams& kp, DVar which, double h = 1e-3,
                      double gap_tol = 1e-9, unsigned threads = 0) {
    auto F = [&](double ds, double drho) {
        KernelParams k2{kp.alpha, kp.rho + drho};
        return gap_log_prob(s + ds, k2, gap_tol, 1.0, threads).F;
    };
    auto central = [&](double hh) {
        if (which == DVar::S) return (F(hh, 0.0) - F(-hh, 0.0)) / (2.0 * hh);
        return (F(0.0, hh) - F(0.0, -hh)) / (2.0 * hh);
    };
    double d1 = central(h), d2 = central(h / 2.0);
    double rich = (4.0 * d2 - d1) / 3.0;
    double est = std::abs(d2 - d1);
    if (est > 0.3 * std::max(1.0, std::abs(rich)))
        throw numerical_error("dF: unstable finite differences");
    return {rich, est};
}

}  // namespace pearcey
