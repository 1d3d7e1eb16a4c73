#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "tdsim/error.hpp"
#include "tdsim/types.hpp"

namespace tdsim {

/// Directed follower graph. Edge (u, v) means "u follows v"; content posted
/// by v reaches u. Edges are kept sorted and unique, with no self-loops.
struct FollowerNetwork {
    std::uint32_t n_nodes = 0;
    std::vector<std::pair<AgentId, AgentId>> edges;

    std::size_t n_edges() const { return edges.size(); }

    static FollowerNetwork from_edges(std::uint32_t n_nodes,
                                      std::vector<std::pair<AgentId, AgentId>> edges) {
        for (const auto& [u, v] : edges) {
            if (u == v) throw ParamError("FollowerNetwork: self-loop " + std::to_string(u));
            if (u >= n_nodes || v >= n_nodes) {
                throw ParamError("FollowerNetwork: endpoint out of range");
            }
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        return FollowerNetwork{n_nodes, std::move(edges)};
    }

    /// followers_of()[v] = accounts following v, i.e. delivery targets when v shares.
    std::vector<std::vector<AgentId>> followers_of() const {
        std::vector<std::vector<AgentId>> adj(n_nodes);
        for (const auto& [u, v] : edges) adj[v].push_back(u);
        return adj;
    }

    /// followees_of()[u] = accounts u follows (out-neighbours).
    std::vector<std::vector<AgentId>> followees_of() const {
        std::vector<std::vector<AgentId>> adj(n_nodes);
        for (const auto& [u, v] : edges) adj[u].push_back(v);
        return adj;
    }

    std::vector<std::uint32_t> in_degrees() const {
        std::vector<std::uint32_t> d(n_nodes, 0);
        for (const auto& e : edges) ++d[e.second];
        return d;
    }

    std::vector<std::uint32_t> out_degrees() const {
        std::vector<std::uint32_t> d(n_nodes, 0);
        for (const auto& e : edges) ++d[e.first];
        return d;
    }
};

}  // namespace tdsim
