#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "tdsim/error.hpp"
#include "tdsim/network.hpp"
#include "tdsim/rng.hpp"

namespace tdsim::net {

enum class DegreeMode { Total, In, Out };

/// Maximal induced subgraph in which every node has degree >= k, by iterative
/// peeling. Node ids are preserved; nodes outside the core become isolated
/// and are dropped from the node set by compaction only when compact = true.
/// The result is independent of peel order.
inline FollowerNetwork k_core(const FollowerNetwork& net, std::uint32_t k,
                              DegreeMode mode = DegreeMode::Total, bool compact = true) {
    if (k < 1) throw ParamError("k_core: k must be >= 1");

    std::vector<std::uint32_t> deg(net.n_nodes, 0);
    for (const auto& [u, v] : net.edges) {
        if (mode != DegreeMode::In) ++deg[u];
        if (mode != DegreeMode::Out) ++deg[v];
    }
    // Peeling needs neighbour lists in both directions regardless of mode;
    // which side of an edge loses degree depends on the mode.
    auto out_adj = net.followees_of();
    auto in_adj = net.followers_of();

    std::vector<bool> removed(net.n_nodes, false);
    std::deque<AgentId> queue;
    for (AgentId v = 0; v < net.n_nodes; ++v) {
        if (deg[v] < k) {
            removed[v] = true;
            queue.push_back(v);
        }
    }
    auto drop = [&](AgentId nb, bool counts) {
        if (!counts || removed[nb]) return;
        if (deg[nb]-- == k) {
            removed[nb] = true;
            queue.push_back(nb);
        }
    };
    while (!queue.empty()) {
        AgentId v = queue.front();
        queue.pop_front();
        // Removing v deletes its incident edges. An out-edge v->w reduces
        // w's in/total degree, an in-edge u->v reduces u's out/total degree.
        for (AgentId w : out_adj[v]) drop(w, mode != DegreeMode::Out);
        for (AgentId u : in_adj[v]) drop(u, mode != DegreeMode::In);
    }

    std::vector<std::pair<AgentId, AgentId>> kept;
    for (const auto& [u, v] : net.edges) {
        if (!removed[u] && !removed[v]) kept.emplace_back(u, v);
    }
    if (!compact) return FollowerNetwork::from_edges(net.n_nodes, std::move(kept));

    std::vector<AgentId> remap(net.n_nodes, 0);
    std::uint32_t next = 0;
    for (AgentId v = 0; v < net.n_nodes; ++v) {
        if (!removed[v]) remap[v] = next++;
    }
    for (auto& [u, v] : kept) {
        u = remap[u];
        v = remap[v];
    }
    return FollowerNetwork::from_edges(next, std::move(kept));
}

/// Keep a uniformly random subset of exactly target_edges edges; the node set
/// is unchanged.
inline FollowerNetwork thin_to_density(const FollowerNetwork& net, std::size_t target_edges,
                                       RandomStream& rng) {
    if (target_edges > net.n_edges()) {
        throw ParamError("thin_to_density: target_edges exceeds edge count");
    }
    auto edges = net.edges;
    // Partial Fisher-Yates: the first target_edges slots end up a uniform sample.
    for (std::size_t i = 0; i < target_edges; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(edges.size() - i));
        std::swap(edges[i], edges[j]);
    }
    edges.resize(target_edges);
    return FollowerNetwork::from_edges(net.n_nodes, std::move(edges));
}

}  // namespace tdsim::net
