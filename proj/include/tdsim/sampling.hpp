#pragma once

#include <cmath>

#include "tdsim/error.hpp"
#include "tdsim/rng.hpp"

namespace tdsim {

/// Draw from a bounded power law with density ~ a^{-gamma} on [a_min, a_max],
/// by inverse-CDF transform. a_min == a_max degenerates to that constant.
inline double sample_activity(RandomStream& rng, double gamma, double a_min, double a_max) {
    if (!(a_min > 0.0) || !(a_max >= a_min)) {
        throw ParamError("sample_activity: need 0 < a_min <= a_max");
    }
    if (!(gamma > 1.0)) {
        throw ParamError("sample_activity: need gamma > 1");
    }
    if (a_min == a_max) {
        return a_min;
    }
    const double e = 1.0 - gamma;  // negative
    const double lo = std::pow(a_min, e);
    const double hi = std::pow(a_max, e);
    const double u = rng.uniform();
    return std::pow(lo + u * (hi - lo), 1.0 / e);
}

/// Message appeal in (0, 1], density 2(1-x): most content has low appeal.
/// Inverse CDF of F(x) = 1 - (1-x)^2 evaluated on 1-u keeps the result
/// strictly positive for u in [0, 1).
inline double sample_appeal(RandomStream& rng) {
    return 1.0 - std::sqrt(rng.uniform());
}

}  // namespace tdsim
