#pragma once

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "tdsim/error.hpp"
#include "tdsim/network.hpp"
#include "tdsim/rng.hpp"

namespace tdsim::net {

/// Directed random-walk growth. Start from a fully connected directed seed of
/// n_init nodes. Each new node first follows one uniformly random existing
/// node, then adds k_out - 1 more followees: with probability p_friend a
/// uniformly random followee of that first pick, otherwise a uniformly random
/// existing node. Collisions (self or already-followed) resample the whole
/// choice, so every non-seed node ends with exactly k_out distinct followees.
inline FollowerNetwork random_walk_growth(std::uint32_t n_final, std::uint32_t n_init,
                                          std::uint32_t k_out, double p_friend,
                                          RandomStream& rng) {
    if (n_init < 2) throw ParamError("random_walk_growth: n_init must be >= 2");
    if (k_out < 1) throw ParamError("random_walk_growth: k_out must be >= 1");
    if (n_final < n_init) throw ParamError("random_walk_growth: n_final < n_init");
    if (!(p_friend >= 0.0 && p_friend <= 1.0)) {
        throw ParamError("random_walk_growth: p_friend must be in [0,1]");
    }

    std::vector<std::pair<AgentId, AgentId>> edges;
    edges.reserve(static_cast<std::size_t>(n_init) * (n_init - 1) +
                  static_cast<std::size_t>(n_final - n_init) * k_out);
    std::vector<std::vector<AgentId>> followees(n_final);

    for (AgentId u = 0; u < n_init; ++u) {
        for (AgentId v = 0; v < n_init; ++v) {
            if (u == v) continue;
            edges.emplace_back(u, v);
            followees[u].push_back(v);
        }
    }

    std::unordered_set<AgentId> chosen;
    for (AgentId node = n_init; node < n_final; ++node) {
        chosen.clear();
        // Fewer existing nodes than k_out caps the achievable out-degree.
        const std::uint32_t want = std::min(k_out, node);
        const AgentId anchor = static_cast<AgentId>(rng.uniform_int(node));
        chosen.insert(anchor);
        followees[node].push_back(anchor);
        const auto& friends = followees[anchor];
        while (followees[node].size() < want) {
            AgentId target;
            if (!friends.empty() && rng.bernoulli(p_friend)) {
                target = friends[rng.uniform_int(friends.size())];
            } else {
                target = static_cast<AgentId>(rng.uniform_int(node));
            }
            if (chosen.insert(target).second) followees[node].push_back(target);
        }
        for (AgentId v : followees[node]) edges.emplace_back(node, v);
    }
    return FollowerNetwork::from_edges(n_final, std::move(edges));
}

}  // namespace tdsim::net
