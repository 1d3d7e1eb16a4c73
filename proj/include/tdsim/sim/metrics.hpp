#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "tdsim/error.hpp"

namespace tdsim::sim {

/// Exponential moving average of prevalence with the relative-change stop
/// rule. Convergence cannot fire before `warmup` updates have been seen.
struct PrevalenceEma {
    double rho = 0.9;
    double epsilon = 1e-4;
    int warmup = 20;
    double current = 0.0;
    double previous = 0.0;
    int updates = 0;
};

/// Feed one prevalence observation. The first observation seeds the average.
/// Returns true when past warmup and the relative change dropped below
/// epsilon. An exact zero plateau (previous == current == 0) also converges;
/// a zero previous value with nonzero current defers the relative test.
inline bool update_ema(PrevalenceEma& ema, double prevalence) {
    if (ema.updates == 0) {
        ema.current = prevalence;
        ema.previous = prevalence;
        ema.updates = 1;
        return false;
    }
    ema.previous = ema.current;
    ema.current = ema.rho * ema.current + (1.0 - ema.rho) * prevalence;
    ++ema.updates;
    if (ema.updates <= ema.warmup) return false;
    if (ema.previous > 0.0) {
        return std::abs(ema.current - ema.previous) / ema.previous < ema.epsilon;
    }
    return ema.current == 0.0;
}

/// Cumulative exposure to illegal content. Impressions counts every delivery
/// of an illegal message into a feed; reach counts distinct users that ever
/// received one.
struct ExposureCounters {
    std::uint64_t impressions = 0;
    std::uint64_t reach = 0;
    std::vector<bool> seen;  // per agent

    explicit ExposureCounters(std::size_t n_agents = 0) : seen(n_agents, false) {}

    void record_illegal_delivery(std::uint32_t agent) {
        ++impressions;
        if (!seen[agent]) {
            seen[agent] = true;
            ++reach;
        }
    }
};

/// Relative reduction versus a baseline mean; negative when the treatment
/// exceeded the baseline.
inline double reduction(double baseline_mean, double treatment_value) {
    if (!(baseline_mean > 0.0)) {
        throw ParamError("reduction: baseline mean must be positive");
    }
    return (baseline_mean - treatment_value) / baseline_mean;
}

}  // namespace tdsim::sim
