#pragma once

// Shared scalar types, constants and small utilities used across the library.

#include <atomic>
#include <complex>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace pearcey {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline const cplx iu{0.0, 1.0};

// omega = e^{2 pi i / 3}, the cube root of unity used throughout.
inline const cplx omega{-0.5, 0.8660254037844386467637231707529362};
inline const cplx omega2{-0.5, -0.8660254037844386467637231707529362};

// Frequently used real constants 2^{p/3}.
inline const double cbrt2   = 1.2599210498948731647672106072782284;  // 2^{1/3}
inline const double cbrt4   = 1.5874010519681994747517056392723083;  // 2^{2/3}
inline const double sqrt3   = 1.7320508075688772935274463415058724;

struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct singular_matrix_error : numerical_error {
    explicit singular_matrix_error(const std::string& msg) : numerical_error(msg) {}
};

// Thrown when adaptive quadrature runs out of subdivision budget.  Carries the
// best estimate so callers may decide whether the achieved error suffices.
struct quadrature_error : numerical_error {
    cplx best_estimate;
    double achieved_error;
    quadrature_error(const std::string& msg, cplx best, double err)
        : numerical_error(msg), best_estimate(best), achieved_error(err) {}
};

// Parameters (alpha, rho) of the hard edge Pearcey process.
struct KernelParams {
    double alpha = 2.0;
    double rho = 0.0;

    bool alpha_is_integer() const {
        return std::abs(alpha - std::round(alpha)) < 1e-12;
    }
    void validate() const {
        if (!(alpha > -1.0)) throw std::invalid_argument("KernelParams: alpha must be > -1");
        if (!std::isfinite(alpha) || !std::isfinite(rho))
            throw std::invalid_argument("KernelParams: non-finite parameter");
    }
};

// Principal argument in (-pi, pi].
inline double princ_arg(cplx z) {
    double a = std::arg(z);
    if (a <= -pi) a += 2 * pi;
    return a;
}

// Principal fractional power z^p, cut along the negative real axis.
inline cplx cpow(cplx z, double p) {
    if (z == cplx(0.0)) return cplx(0.0);
    return std::exp(p * std::log(z));
}

// Deterministic parallel map over [0, n): results are written by index, so the
// output order never depends on thread scheduling.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                         unsigned threads = 0) {
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                body(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace pearcey
