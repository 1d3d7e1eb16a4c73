#pragma once

// Independent reference implementations used to check the library. These take
// the slow-but-obvious route on purpose and must not share code with the
// implementations under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "tdsim/network.hpp"
#include "tdsim/rng.hpp"

namespace oracles {

/// k-core by exhaustive subset enumeration: union of all induced subgraphs
/// whose minimum (total) degree is >= k. Only feasible for tiny graphs.
inline std::set<tdsim::AgentId> brute_force_k_core_nodes(const tdsim::FollowerNetwork& net,
                                                         std::uint32_t k) {
    const std::uint32_t n = net.n_nodes;
    std::set<tdsim::AgentId> best;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        std::vector<std::uint32_t> deg(n, 0);
        for (const auto& [u, v] : net.edges) {
            if ((mask >> u & 1) && (mask >> v & 1)) {
                ++deg[u];
                ++deg[v];
            }
        }
        bool ok = true;
        for (std::uint32_t v = 0; v < n; ++v) {
            if ((mask >> v & 1) && deg[v] < k) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (mask >> v & 1) best.insert(v);
        }
    }
    return best;
}

/// Median read off the empirical survival curve with log-linear interpolation
/// between integer support points, the natural estimator when the survival is
/// exponential-like. Falls back to the plain crossing point at the boundary.
inline double survival_median(const std::vector<std::int32_t>& lifetimes) {
    std::vector<std::int32_t> sorted(lifetimes);
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    auto survival_at = [&](std::int32_t t) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
        return static_cast<double>(sorted.end() - it) / n;
    };
    for (std::int32_t t = 0;; ++t) {
        const double s0 = survival_at(t);
        const double s1 = survival_at(t + 1);
        if (s1 < 0.5) {
            if (s1 <= 0.0) return static_cast<double>(t);
            const double l0 = std::log(s0), l1 = std::log(s1);
            const double lm = std::log(0.5);
            return static_cast<double>(t) + (l0 - lm) / (l0 - l1);
        }
    }
}

/// Random simple directed graph on n nodes where each ordered pair is an edge
/// with probability p.
inline tdsim::FollowerNetwork random_directed_graph(std::uint32_t n, double p,
                                                    tdsim::RandomStream& rng) {
    std::vector<std::pair<tdsim::AgentId, tdsim::AgentId>> edges;
    for (std::uint32_t u = 0; u < n; ++u) {
        for (std::uint32_t v = 0; v < n; ++v) {
            if (u != v && rng.uniform() < p) edges.emplace_back(u, v);
        }
    }
    return tdsim::FollowerNetwork::from_edges(n, std::move(edges));
}

}  // namespace oracles
