#pragma once

// Richardson extrapolation of boundary values: given samples v(delta) with
// delta decreasing geometrically and the model v = v0 + a*delta^order + o(.),
// eliminate the leading term pairwise and report the finest result together
// with a consistency estimate from the previous level.

#include "pearcey/core.hpp"

namespace pearcey {

struct Extrapolation {
    cplx value;
    double est_error;
};

inline Extrapolation extrapolate_to_zero(const std::vector<std::pair<double, cplx>>& samples,
                                         double order) {
    if (samples.size() < 3)
        throw std::invalid_argument("extrapolate_to_zero: need at least 3 samples");
    if (!(order > 0.0)) throw std::invalid_argument("extrapolate_to_zero: order must be > 0");
    for (std::size_t i = 0; i + 1 < samples.size(); ++i)
        if (!(samples[i + 1].first < samples[i].first) || !(samples[i].first > 0.0))
            throw std::invalid_argument("extrapolate_to_zero: deltas must decrease monotonically");

    std::vector<cplx> e;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        double d0 = std::pow(samples[i].first, order);
        double d1 = std::pow(samples[i + 1].first, order);
        e.push_back((samples[i + 1].second * d0 - samples[i].second * d1) / (d0 - d1));
    }
    cplx v = e.back();
    double err = e.size() >= 2 ? std::abs(e[e.size() - 1] - e[e.size() - 2])
                               : std::abs(v - samples.back().second);
    return {v, err};
}

}  // namespace pearcey
