#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "tdsim/error.hpp"
#include "tdsim/network.hpp"

namespace tdsim::net {

struct EdgeListStats {
    std::size_t lines_read = 0;
    std::size_t self_loops_skipped = 0;
    std::size_t duplicates_merged = 0;
};

namespace detail {

inline bool parse_u32(std::string_view s, std::uint32_t& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc{} && res.ptr == e;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace detail

/// Read a delimited edge list: one "follower,followee" (or tab-separated) pair
/// per line. An optional "# nodes=N" header fixes the node count, which
/// otherwise becomes max id + 1. Self-loops are skipped with a counter,
/// duplicate edges merge silently, anything else malformed is an error with
/// its line number.
inline FollowerNetwork load_edge_list(const std::string& path, EdgeListStats* stats = nullptr) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open edge list: " + path);

    std::vector<std::pair<AgentId, AgentId>> edges;
    std::uint32_t n_nodes = 0;
    bool n_from_header = false;
    EdgeListStats local;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s = detail::trim(line);
        if (s.empty()) continue;
        if (s.front() == '#') {
            std::string_view body = detail::trim(s.substr(1));
            if (body.rfind("nodes=", 0) == 0) {
                std::uint32_t n;
                if (!detail::parse_u32(detail::trim(body.substr(6)), n)) {
                    throw DataError(path + ":" + std::to_string(lineno) + ": bad nodes header");
                }
                n_nodes = n;
                n_from_header = true;
            }
            continue;
        }
        std::size_t sep = s.find_first_of(",\t ");
        if (sep == std::string_view::npos) {
            throw DataError(path + ":" + std::to_string(lineno) + ": expected two ids");
        }
        std::uint32_t u, v;
        if (!detail::parse_u32(detail::trim(s.substr(0, sep)), u) ||
            !detail::parse_u32(detail::trim(s.substr(sep + 1)), v)) {
            throw DataError(path + ":" + std::to_string(lineno) + ": unparseable ids");
        }
        ++local.lines_read;
        if (u == v) {
            ++local.self_loops_skipped;
            std::fprintf(stderr, "warning: %s:%zu: self-loop %u skipped\n", path.c_str(),
                         lineno, u);
            continue;
        }
        edges.emplace_back(u, v);
        if (!n_from_header) n_nodes = std::max({n_nodes, u + 1, v + 1});
    }
    if (edges.empty() && n_nodes == 0) throw DataError(path + ": empty graph");

    const std::size_t raw = edges.size();
    auto net = FollowerNetwork::from_edges(n_nodes, std::move(edges));
    local.duplicates_merged = raw - net.n_edges();
    if (stats) *stats = local;
    return net;
}

inline void save_edge_list(const FollowerNetwork& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write edge list: " + path);
    out << "# nodes=" << net.n_nodes << "\n";
    for (const auto& [u, v] : net.edges) out << u << "\t" << v << "\n";
    if (!out) throw DataError("write failed: " + path);
}

}  // namespace tdsim::net
