#pragma once

// Directed contours in the complex plane and panel-adaptive Gauss quadrature
// along them.  Error control compares 16- and 32-point Gauss values per panel;
// panels whose integrand is negligible against the global maximum are dropped,
// which is what makes contours through essential singularities integrable
// (the integrand decays double-exponentially there).

#include <algorithm>
#include <variant>

#include "pearcey/core.hpp"
#include "pearcey/quadrature.hpp"

namespace pearcey {

struct LineSeg {
    cplx a, b;
};
struct CircleSeg {
    cplx center;
    double radius;
    double theta0, theta1;  // traversed from theta0 to theta1
};
struct RaySeg {
    cplx origin;
    cplx direction;  // unit vector
    double length;
};

using ContourSeg = std::variant<LineSeg, CircleSeg, RaySeg>;

struct ContourPath {
    std::vector<ContourSeg> segments;
    double arg_min = -pi, arg_max = pi;  // admissible argument range of points

    static ContourPath line(cplx a, cplx b) {
        ContourPath p;
        p.segments.push_back(LineSeg{a, b});
        return p;
    }
    static ContourPath circle(cplx center, double radius, double th0, double th1) {
        ContourPath p;
        p.segments.push_back(CircleSeg{center, radius, th0, th1});
        return p;
    }
    ContourPath& add_line(cplx a, cplx b) {
        segments.push_back(LineSeg{a, b});
        return *this;
    }
    ContourPath& add_circle(cplx c, double r, double th0, double th1) {
        segments.push_back(CircleSeg{c, r, th0, th1});
        return *this;
    }
    ContourPath& add_ray(cplx origin, cplx dir, double length) {
        segments.push_back(RaySeg{origin, dir / std::abs(dir), length});
        return *this;
    }

    // point and velocity at parameter u in [0,1] of segment k
    std::pair<cplx, cplx> at(std::size_t k, double u) const {
        const auto& seg = segments[k];
        if (std::holds_alternative<LineSeg>(seg)) {
            const auto& s = std::get<LineSeg>(seg);
            return {s.a + (s.b - s.a) * u, s.b - s.a};
        }
        if (std::holds_alternative<CircleSeg>(seg)) {
            const auto& s = std::get<CircleSeg>(seg);
            double th = s.theta0 + (s.theta1 - s.theta0) * u;
            cplx e = std::exp(iu * th);
            return {s.center + s.radius * e, iu * s.radius * e * (s.theta1 - s.theta0)};
        }
        const auto& s = std::get<RaySeg>(seg);
        return {s.origin + s.direction * (s.length * u), s.direction * s.length};
    }

    bool endpoints_chain(double tol = 1e-12) const {
        for (std::size_t k = 0; k + 1 < segments.size(); ++k) {
            cplx e = at(k, 1.0).first, b = at(k + 1, 0.0).first;
            if (std::abs(e - b) > tol) return false;
        }
        return true;
    }
};

struct ContourResult {
    cplx value;
    double est_error;
    std::size_t panels_used;
};

namespace detail {

// Integrates nfun integrands simultaneously along the path; shared panels,
// subdivision driven by the worst per-panel 16-vs-32-point discrepancy.
template <typename F>
inline std::size_t integrate_multi(const F& f, int nfun, const ContourPath& path, double tol,
                                   cplx* out, double* err_out, std::size_t budget = 60000) {
    const QuadratureRule& g16 = gauss_legendre(16);
    const QuadratureRule& g32 = gauss_legendre(32);

    struct Panel {
        std::size_t seg;
        double u0, u1;
        std::vector<cplx> v16, v32;
        double sup = 0.0;  // max |f| over sampled nodes, across components
        double err = 0.0;
    };

    std::vector<cplx> fv(nfun);
    auto eval_panel = [&](Panel& p) {
        p.v16.assign(nfun, cplx(0.0));
        p.v32.assign(nfun, cplx(0.0));
        p.sup = 0.0;
        const double half = 0.5 * (p.u1 - p.u0), mid = 0.5 * (p.u0 + p.u1);
        for (int i = 0; i < 16; ++i) {
            auto [z, dz] = path.at(p.seg, mid + half * g16.nodes[i]);
            f(z, fv.data());
            for (int c = 0; c < nfun; ++c) {
                p.v16[c] += g16.weights[i] * half * fv[c] * dz;
                p.sup = std::max(p.sup, std::abs(fv[c]));
            }
        }
        for (int i = 0; i < 32; ++i) {
            auto [z, dz] = path.at(p.seg, mid + half * g32.nodes[i]);
            f(z, fv.data());
            for (int c = 0; c < nfun; ++c) {
                p.v32[c] += g32.weights[i] * half * fv[c] * dz;
                p.sup = std::max(p.sup, std::abs(fv[c]));
            }
        }
        p.err = 0.0;
        for (int c = 0; c < nfun; ++c) p.err = std::max(p.err, std::abs(p.v32[c] - p.v16[c]));
    };

    std::vector<Panel> panels;
    for (std::size_t k = 0; k < path.segments.size(); ++k)
        for (int j = 0; j < 4; ++j) {
            Panel p;
            p.seg = k;
            p.u0 = j / 4.0;
            p.u1 = (j + 1) / 4.0;
            eval_panel(p);
            panels.push_back(std::move(p));
        }
    std::size_t used = panels.size();

    // Per-component scales: relative to the component's own magnitude, but
    // never demanding more than ~3 digits below the cancellation level
    // sum |panel values| (the honest roundoff floor for oscillatory paths).
    std::vector<double> scale(nfun), total_err(nfun), floor_abs(nfun);
    auto totals = [&](double& global_sup) {
        global_sup = 0.0;
        for (const auto& p : panels) global_sup = std::max(global_sup, p.sup);
        for (int c = 0; c < nfun; ++c) {
            cplx acc(0.0);
            double l1 = 0.0;
            for (const auto& p : panels) {
                acc += p.v32[c];
                l1 += std::abs(p.v32[c]);
            }
            scale[c] = std::max({std::abs(acc), 1e-3 * l1, 1e-300});
            floor_abs[c] = 1e-14 * l1;  // roundoff floor for cancelling paths
            total_err[c] = 0.0;
        }
        for (const auto& p : panels) {
            if (p.sup < tol * global_sup) continue;  // essential-singularity tails
            for (int c = 0; c < nfun; ++c) total_err[c] += std::abs(p.v32[c] - p.v16[c]);
        }
    };
    auto converged = [&]() {
        for (int c = 0; c < nfun; ++c)
            if (total_err[c] > tol * scale[c] + floor_abs[c]) return false;
        return true;
    };

    for (int sweep = 0; sweep < 80; ++sweep) {
        double global_sup;
        totals(global_sup);
        if (converged()) break;

        // split every contributing panel whose error exceeds its fair share
        double inv2n = 1.0 / (2.0 * panels.size());
        std::vector<Panel> next;
        next.reserve(panels.size() * 2);
        bool split_any = false;
        for (auto& p : panels) {
            bool negligible = p.sup < tol * global_sup;
            bool needs_split = false;
            if (!negligible)
                for (int c = 0; c < nfun; ++c)
                    if (std::abs(p.v32[c] - p.v16[c]) > tol * scale[c] * inv2n) needs_split = true;
            if (!needs_split || used + 2 > budget) {
                next.push_back(std::move(p));
                continue;
            }
            Panel a, b;
            a.seg = b.seg = p.seg;
            double um = 0.5 * (p.u0 + p.u1);
            a.u0 = p.u0;
            a.u1 = um;
            b.u0 = um;
            b.u1 = p.u1;
            eval_panel(a);
            eval_panel(b);
            next.push_back(std::move(a));
            next.push_back(std::move(b));
            used += 2;
            split_any = true;
        }
        panels = std::move(next);
        if (!split_any) {
            totals(global_sup);
            if (!converged()) {
                double worst = 0.0;
                for (int c = 0; c < nfun; ++c) {
                    out[c] = cplx(0.0);
                    for (const auto& p : panels) out[c] += p.v32[c];
                    worst = std::max(worst, total_err[c]);
                }
                throw quadrature_error("integrate_contour: subdivision budget exhausted", out[0],
                                       worst);
            }
            break;
        }
    }

    for (int c = 0; c < nfun; ++c) {
        cplx acc(0.0);
        double e = 0.0;
        for (const auto& p : panels) {
            acc += p.v32[c];
            e += std::abs(p.v32[c] - p.v16[c]);
        }
        out[c] = acc;
        err_out[c] = e;
    }
    return used;
}

}  // namespace detail

template <typename F>
inline ContourResult integrate_contour(const F& f, const ContourPath& path, double tol = 1e-12) {
    if (tol < 1e-14) tol = 1e-14;
    cplx value;
    double err;
    auto wrap = [&](cplx z, cplx* out) { out[0] = f(z); };
    std::size_t used = detail::integrate_multi(wrap, 1, path, tol, &value, &err);
    return {value, err, used};
}

// Simultaneous integration of several integrands sharing one path (returned in
// order).  Used for (P_k, P_k', P_k'') in a single pass.
template <typename F>
inline std::vector<cplx> integrate_contour_multi(const F& f, int nfun, const ContourPath& path,
                                                 double tol = 1e-12) {
    if (tol < 1e-14) tol = 1e-14;
    std::vector<cplx> value(nfun);
    std::vector<double> err(nfun);
    detail::integrate_multi(f, nfun, path, tol, value.data(), err.data());
    return value;
}

}  // namespace pearcey
