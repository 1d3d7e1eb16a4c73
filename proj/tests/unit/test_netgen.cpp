#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "support/oracles.hpp"
#include "tdsim/exp/stats.hpp"
#include "tdsim/net/edgelist.hpp"
#include "tdsim/net/growth.hpp"
#include "tdsim/net/reduce.hpp"

using namespace tdsim;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path);
    out << content;
    return path;
}

FollowerNetwork triangle() {
    return FollowerNetwork::from_edges(3, {{0, 1}, {1, 2}, {2, 0}});
}

}  // namespace

TEST_CASE("edge list dedups and keeps reciprocal edges", "[netgen]") {
    const auto path = write_temp("tdsim_edges_dedup.txt", "0,1\n1,0\n0,1\n");
    const auto net = net::load_edge_list(path);
    REQUIRE(net.n_nodes == 2);
    REQUIRE(net.n_edges() == 2);
}

TEST_CASE("self-loop lines are skipped with a warning count", "[netgen]") {
    const auto path = write_temp("tdsim_edges_loop.txt", "0,0\n0,1\n");
    net::EdgeListStats stats;
    const auto net = net::load_edge_list(path, &stats);
    REQUIRE(net.n_edges() == 1);
    REQUIRE(stats.self_loops_skipped == 1);
}

TEST_CASE("malformed lines error with their number", "[netgen]") {
    const auto path = write_temp("tdsim_edges_bad.txt", "0,1\nnot-an-edge\n");
    try {
        net::load_edge_list(path);
        FAIL("expected DataError");
    } catch (const DataError& err) {
        REQUIRE(std::string(err.what()).find(":2") != std::string::npos);
    }
}

TEST_CASE("five edge fixture matches hand-written adjacency", "[netgen]") {
    const auto path = write_temp("tdsim_edges_fixture.txt", "0\t1\n1\t2\n2\t3\n3\t0\n0\t2\n");
    const auto net = net::load_edge_list(path);
    REQUIRE(net.n_nodes == 4);
    REQUIRE(net.n_edges() == 5);
    const auto followers = net.followers_of();
    REQUIRE(followers[1] == std::vector<AgentId>{0});
    REQUIRE(followers[2] == std::vector<AgentId>{0, 1});
    REQUIRE(followers[3] == std::vector<AgentId>{2});
    REQUIRE(followers[0] == std::vector<AgentId>{3});
}

TEST_CASE("edge list round-trips through save and load", "[netgen]") {
    auto rng = seed_rng(77);
    const auto net = oracles::random_directed_graph(12, 0.2, rng);
    const auto path = (std::filesystem::temp_directory_path() / "tdsim_edges_rt.txt").string();
    net::save_edge_list(net, path);
    const auto back = net::load_edge_list(path);
    REQUIRE(back.n_nodes == net.n_nodes);
    REQUIRE(back.edges == net.edges);
}

TEST_CASE("triangle survives the 2-core", "[netgen]") {
    const auto core = net::k_core(triangle(), 2);
    REQUIRE(core.n_nodes == 3);
    REQUIRE(core.n_edges() == 3);
}

TEST_CASE("directed path has empty 2-core", "[netgen]") {
    const auto net = FollowerNetwork::from_edges(3, {{0, 1}, {1, 2}});
    const auto core = net::k_core(net, 2);
    REQUIRE(core.n_nodes == 0);
    REQUIRE(core.n_edges() == 0);
}

TEST_CASE("1-core keeps every non-isolated node", "[netgen]") {
    auto rng = seed_rng(123);
    const auto net = oracles::random_directed_graph(9, 0.15, rng);
    const auto core = net::k_core(net, 1, net::DegreeMode::Total, /*compact=*/false);
    std::set<AgentId> with_degree;
    for (const auto& [u, v] : net.edges) {
        with_degree.insert(u);
        with_degree.insert(v);
    }
    std::set<AgentId> in_core;
    for (const auto& [u, v] : core.edges) {
        in_core.insert(u);
        in_core.insert(v);
    }
    REQUIRE(in_core == with_degree);
    REQUIRE(core.edges == net.edges);
}

TEST_CASE("k_core matches subset enumeration on small graphs", "[netgen]") {
    auto rng = seed_rng(2025);
    for (int trial = 0; trial < 60; ++trial) {
        const auto n = static_cast<std::uint32_t>(3 + rng.uniform_int(6));  // 3..8
        const auto net = oracles::random_directed_graph(n, 0.35, rng);
        const auto k = static_cast<std::uint32_t>(1 + rng.uniform_int(4));
        const auto expected = oracles::brute_force_k_core_nodes(net, k);
        const auto core = net::k_core(net, k, net::DegreeMode::Total, /*compact=*/false);
        std::set<AgentId> got;
        for (const auto& [u, v] : core.edges) {
            got.insert(u);
            got.insert(v);
        }
        REQUIRE(got == expected);
    }
}

TEST_CASE("k_core is a fixed point", "[netgen]") {
    auto rng = seed_rng(31);
    const auto net = oracles::random_directed_graph(40, 0.12, rng);
    const auto once = net::k_core(net, 4);
    const auto twice = net::k_core(once, 4);
    REQUIRE(once.n_nodes == twice.n_nodes);
    REQUIRE(once.edges == twice.edges);
}

TEST_CASE("thin keeps the node set and exact edge count", "[netgen]") {
    auto rng = seed_rng(8);
    const auto net = oracles::random_directed_graph(10, 0.3, rng);
    SECTION("target equal to E is the identity") {
        const auto same = net::thin_to_density(net, net.n_edges(), rng);
        REQUIRE(same.edges == net.edges);
    }
    SECTION("target 0 empties the edge set only") {
        const auto empty = net::thin_to_density(net, 0, rng);
        REQUIRE(empty.n_nodes == net.n_nodes);
        REQUIRE(empty.n_edges() == 0);
    }
    SECTION("subset of the original edges") {
        const auto thinned = net::thin_to_density(net, 7, rng);
        REQUIRE(thinned.n_edges() == 7);
        for (const auto& e : thinned.edges) {
            REQUIRE(std::find(net.edges.begin(), net.edges.end(), e) != net.edges.end());
        }
    }
    SECTION("target above E is rejected") {
        REQUIRE_THROWS_AS(net::thin_to_density(net, net.n_edges() + 1, rng), ParamError);
    }
}

TEST_CASE("thin samples edges uniformly", "[netgen]") {
    const auto net = FollowerNetwork::from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3},
                                                     {2, 3}});
    auto rng = seed_rng(55);
    const int reps = 3000;
    std::vector<double> counts(6, 0.0);
    for (int r = 0; r < reps; ++r) {
        const auto thinned = net::thin_to_density(net, 3, rng);
        for (const auto& e : thinned.edges) {
            const auto idx = std::find(net.edges.begin(), net.edges.end(), e) - net.edges.begin();
            counts[static_cast<std::size_t>(idx)] += 1.0;
        }
    }
    const std::vector<double> expected(6, reps * 0.5);
    // Inclusion counts are dependent but the chi-square flags gross bias.
    REQUIRE(tdsim::exp::chi_square_gof(counts, expected) > 1e-3);
}

TEST_CASE("growth with n_final equal to n_init is the complete seed", "[netgen]") {
    auto rng = seed_rng(4);
    const auto net = net::random_walk_growth(3, 3, 2, 0.5, rng);
    REQUIRE(net.n_nodes == 3);
    REQUIRE(net.n_edges() == 6);
}

TEST_CASE("growth gives every non-seed node exactly k_out followees", "[netgen]") {
    auto rng = seed_rng(9);
    const auto net = net::random_walk_growth(10, 3, 2, 0.5, rng);
    REQUIRE(net.n_nodes == 10);
    const auto out = net.out_degrees();
    for (AgentId v = 3; v < 10; ++v) REQUIRE(out[v] == 2);
    for (const auto& [u, v] : net.edges) REQUIRE(u != v);
    // from_edges would have merged duplicates; equality of counts proves none.
    std::size_t expected_edges = 3 * 2 + 7 * 2;
    REQUIRE(net.n_edges() == expected_edges);
}

TEST_CASE("growth rejects bad parameters", "[netgen]") {
    auto rng = seed_rng(10);
    REQUIRE_THROWS_AS(net::random_walk_growth(5, 6, 2, 0.5, rng), ParamError);
    REQUIRE_THROWS_AS(net::random_walk_growth(5, 1, 2, 0.5, rng), ParamError);
    REQUIRE_THROWS_AS(net::random_walk_growth(5, 2, 0, 0.5, rng), ParamError);
}

TEST_CASE("desk-scale growth hits the expected density", "[netgen]") {
    auto rng = seed_rng(12);
    const auto net = net::random_walk_growth(1000, 21, 20, 0.5, rng);
    REQUIRE(net.n_nodes == 1000);
    REQUIRE(net.n_edges() == 21 * 20 + 979 * 20);
}
