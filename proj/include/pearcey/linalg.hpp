#pragma once

// Dense complex matrices: LU with partial pivoting (row-equilibrated),
// log-determinant with phase reduced mod 2*pi, and linear solves with one step
// of iterative refinement.  A fixed-size 3x3 type carries the parametrix
// algebra of the Riemann-Hilbert analysis.

#include <array>

#include "pearcey/core.hpp"

namespace pearcey {

class MatrixC {
  public:
    MatrixC() = default;
    explicit MatrixC(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, cplx(0.0)) {}
    static MatrixC identity(int n) {
        MatrixC m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int size() const { return n_; }
    cplx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    cplx operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    MatrixC operator*(const MatrixC& rhs) const {
        MatrixC r(n_);
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < n_; ++k) {
                cplx aik = (*this)(i, k);
                if (aik == cplx(0.0)) continue;
                for (int j = 0; j < n_; ++j) r(i, j) += aik * rhs(k, j);
            }
        return r;
    }

  private:
    int n_ = 0;
    std::vector<cplx> a_;
};

namespace detail {

struct LU {
    MatrixC lu;
    std::vector<int> piv;
    std::vector<double> row_scale;   // permuted along with the rows
    std::vector<double> scale_orig;  // indexed by original row
    int sign = 1;
};

inline LU factorize(const MatrixC& m) {
    const int n = m.size();
    LU f;
    f.lu = m;
    f.piv.resize(n);
    f.row_scale.assign(n, 1.0);

    // row equilibration by infinity norm
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s = std::max(s, std::abs(f.lu(i, j)));
        if (s == 0.0) throw singular_matrix_error("factorize: zero row");
        f.row_scale[i] = 1.0 / s;
        for (int j = 0; j < n; ++j) f.lu(i, j) *= f.row_scale[i];
    }
    f.scale_orig = f.row_scale;

    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(f.lu(k, k));
        for (int i = k + 1; i < n; ++i) {
            double v = std::abs(f.lu(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (best < 1e-300)
            throw singular_matrix_error("factorize: singular pivot at column " + std::to_string(k));
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(p, j));
            std::swap(f.row_scale[k], f.row_scale[p]);
            f.sign = -f.sign;
        }
        f.piv[k] = p;
        cplx inv = 1.0 / f.lu(k, k);
        for (int i = k + 1; i < n; ++i) {
            cplx l = f.lu(i, k) * inv;
            f.lu(i, k) = l;
            for (int j = k + 1; j < n; ++j) f.lu(i, j) -= l * f.lu(k, j);
        }
    }
    return f;
}

}  // namespace detail

// log det M with the imaginary part (accumulated phase) reduced to (-pi, pi].
inline cplx logdet(const MatrixC& m) {
    detail::LU f = detail::factorize(m);
    const int n = m.size();
    double re = 0.0, im = 0.0;
    for (int i = 0; i < n; ++i) {
        cplx d = f.lu(i, i);
        re += std::log(std::abs(d));
        im += std::arg(d);
        re -= std::log(f.row_scale[i]);  // undo equilibration
    }
    if (f.sign < 0) im += pi;
    im = std::remainder(im, 2.0 * pi);
    if (im <= -pi) im += 2.0 * pi;
    return {re, im};
}

// Solve M X = B with row equilibration and one step of iterative refinement.
inline MatrixC solve_linear(const MatrixC& m, const MatrixC& b) {
    const int n = m.size();
    if (b.size() != n) throw std::invalid_argument("solve_linear: dimension mismatch");
    detail::LU f = detail::factorize(m);

    auto solve_one = [&](std::vector<cplx>& rhs) {
        for (int i = 0; i < n; ++i) rhs[i] *= f.scale_orig[i];
        // replay the factorization's row swaps in order
        for (int k = 0; k < n; ++k)
            if (f.piv[k] != k) std::swap(rhs[k], rhs[f.piv[k]]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j) rhs[i] -= f.lu(i, j) * rhs[j];
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j) rhs[i] -= f.lu(i, j) * rhs[j];
            rhs[i] /= f.lu(i, i);
        }
    };

    MatrixC x(n);
    std::vector<cplx> col(n), resid(n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) col[i] = b(i, j);
        std::vector<cplx> rhs = col;
        solve_one(rhs);
        // one refinement step
        for (int i = 0; i < n; ++i) {
            cplx r = col[i];
            for (int k = 0; k < n; ++k) r -= m(i, k) * rhs[k];
            resid[i] = r;
        }
        solve_one(resid);
        for (int i = 0; i < n; ++i) x(i, j) = rhs[i] + resid[i];
    }
    return x;
}

// ---------------------------------------------------------------------------
// Fixed-size 2x2 and 3x3 complex matrices for the parametrix algebra.

struct Mat2 {
    std::array<cplx, 4> a{};
    cplx& operator()(int i, int j) { return a[i * 2 + j]; }
    cplx operator()(int i, int j) const { return a[i * 2 + j]; }
    static Mat2 identity() {
        Mat2 m;
        m(0, 0) = m(1, 1) = 1.0;
        return m;
    }
    Mat2 operator*(const Mat2& r) const {
        Mat2 m;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                m(i, j) = (*this)(i, 0) * r(0, j) + (*this)(i, 1) * r(1, j);
        return m;
    }
    cplx det() const { return a[0] * a[3] - a[1] * a[2]; }
    Mat2 inverse() const {
        cplx d = det();
        if (std::abs(d) == 0.0) throw singular_matrix_error("Mat2::inverse: singular");
        Mat2 m;
        m(0, 0) = a[3] / d;
        m(0, 1) = -a[1] / d;
        m(1, 0) = -a[2] / d;
        m(1, 1) = a[0] / d;
        return m;
    }
};

struct Mat3 {
    std::array<cplx, 9> a{};
    cplx& operator()(int i, int j) { return a[i * 3 + j]; }
    cplx operator()(int i, int j) const { return a[i * 3 + j]; }
    static Mat3 identity() {
        Mat3 m;
        m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
        return m;
    }
    static Mat3 diag(cplx d0, cplx d1, cplx d2) {
        Mat3 m;
        m(0, 0) = d0;
        m(1, 1) = d1;
        m(2, 2) = d2;
        return m;
    }
    Mat3 operator*(const Mat3& r) const {
        Mat3 m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                m(i, j) = (*this)(i, 0) * r(0, j) + (*this)(i, 1) * r(1, j) +
                          (*this)(i, 2) * r(2, j);
        return m;
    }
    Mat3 operator+(const Mat3& r) const {
        Mat3 m;
        for (int i = 0; i < 9; ++i) m.a[i] = a[i] + r.a[i];
        return m;
    }
    Mat3 operator-(const Mat3& r) const {
        Mat3 m;
        for (int i = 0; i < 9; ++i) m.a[i] = a[i] - r.a[i];
        return m;
    }
    Mat3 operator*(cplx s) const {
        Mat3 m;
        for (int i = 0; i < 9; ++i) m.a[i] = a[i] * s;
        return m;
    }
    cplx det() const {
        return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
               a[2] * (a[3] * a[7] - a[4] * a[6]);
    }
    Mat3 inverse() const {
        cplx d = det();
        if (std::abs(d) == 0.0) throw singular_matrix_error("Mat3::inverse: singular");
        Mat3 m;
        m(0, 0) = (a[4] * a[8] - a[5] * a[7]) / d;
        m(0, 1) = (a[2] * a[7] - a[1] * a[8]) / d;
        m(0, 2) = (a[1] * a[5] - a[2] * a[4]) / d;
        m(1, 0) = (a[5] * a[6] - a[3] * a[8]) / d;
        m(1, 1) = (a[0] * a[8] - a[2] * a[6]) / d;
        m(1, 2) = (a[2] * a[3] - a[0] * a[5]) / d;
        m(2, 0) = (a[3] * a[7] - a[4] * a[6]) / d;
        m(2, 1) = (a[1] * a[6] - a[0] * a[7]) / d;
        m(2, 2) = (a[0] * a[4] - a[1] * a[3]) / d;
        return m;
    }
    double norm() const {  // max-entry norm
        double s = 0.0;
        for (const auto& v : a) s = std::max(s, std::abs(v));
        return s;
    }
};

inline Mat3 operator*(cplx s, const Mat3& m) { return m * s; }

}  // namespace pearcey
