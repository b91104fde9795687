#pragma once

// Gauss-Legendre rules on (-1,1).  Nodes are Legendre roots found by Newton
// iteration from the Chebyshev initial guess; weights w = 2/((1-x^2) P_n'^2).

#include <map>
#include <mutex>

#include "pearcey/core.hpp"

namespace pearcey {

struct QuadratureRule {
    std::vector<double> nodes;    // strictly increasing, symmetric about 0
    std::vector<double> weights;  // positive, sum to 2
};

namespace detail {

inline QuadratureRule gauss_legendre_compute(int n) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-like guess for the i-th root of P_n.
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        bool converged = false;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) * z * p2 - (j - 1) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double dz = -p1 / pp;
            z += dz;
            if (std::abs(dz) < 1e-15) {
                converged = true;
                break;
            }
        }
        if (!converged) throw numerical_error("gauss_legendre: Newton did not converge");
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        double w = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;  // symmetry-forced
    return rule;
}

}  // namespace detail

inline const QuadratureRule& gauss_legendre(int n) {
    if (n < 1 || n > 4096) throw std::invalid_argument("gauss_legendre: n out of range [1,4096]");
    static std::map<int, QuadratureRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::gauss_legendre_compute(n)).first;
    return it->second;
}

}  // namespace pearcey
