#include <catch2/catch_amalgamated.hpp>

#include "tdsim/sim/engine.hpp"
#include "tdsim/sim/metrics.hpp"

using namespace tdsim;
using namespace tdsim::sim;

namespace {

SimState two_agent_state(std::size_t feed_capacity = 15) {
    SimConfig cfg;
    cfg.feed_capacity = feed_capacity;
    cfg.seed = 1;
    const auto net = FollowerNetwork::from_edges(2, {{0, 1}});
    const std::vector<double> probs = {0.0, 0.0};
    return init_state(cfg, net, probs);
}

MessageId add_message(SimState& state, bool illegal) {
    Message m;
    m.id = static_cast<MessageId>(state.messages.size());
    m.illegal = illegal;
    state.messages.push_back(m);
    return m.id;
}

}  // namespace

TEST_CASE("prevalence of all-empty feeds is zero", "[metrics]") {
    const auto state = two_agent_state();
    REQUIRE(prevalence(state) == 0.0);
}

TEST_CASE("prevalence averages per-feed fractions", "[metrics]") {
    auto state = two_agent_state();
    state.agents[0].feed = {add_message(state, true)};
    state.agents[1].feed = {add_message(state, false), add_message(state, false),
                            add_message(state, false), add_message(state, false)};
    REQUIRE(prevalence(state) == Catch::Approx(0.5));
}

TEST_CASE("prevalence of fully illegal feeds is one", "[metrics]") {
    auto state = two_agent_state();
    state.agents[0].feed = {add_message(state, true), add_message(state, true)};
    state.agents[1].feed = {add_message(state, true)};
    REQUIRE(prevalence(state) == 1.0);
}

TEST_CASE("constant series converges at the first post-warmup check", "[metrics]") {
    PrevalenceEma ema;
    int converged_at = -1;
    for (int t = 0; t < 50; ++t) {
        if (update_ema(ema, 0.3)) {
            converged_at = t;
            break;
        }
    }
    REQUIRE(converged_at == ema.warmup);  // updates = warmup + 1 at that point
    REQUIRE(ema.current == Catch::Approx(0.3));
}

TEST_CASE("alternating series does not converge in 100 steps", "[metrics]") {
    PrevalenceEma ema;
    for (int t = 0; t < 100; ++t) {
        REQUIRE_FALSE(update_ema(ema, t % 2 == 0 ? 0.0 : 1.0));
    }
}

TEST_CASE("small relative change converges once past warmup", "[metrics]") {
    PrevalenceEma ema;
    ema.current = 0.5;
    ema.previous = 0.5;
    ema.updates = 30;  // past warmup
    REQUIRE(update_ema(ema, 0.5001));
    REQUIRE(ema.current == Catch::Approx(0.50001));
    REQUIRE(std::abs(ema.current - ema.previous) / ema.previous < 1e-4);
}

TEST_CASE("EMA stays within the convex hull of its inputs", "[metrics]") {
    PrevalenceEma ema;
    RandomStream rng(5);
    update_ema(ema, 0.4);
    for (int t = 0; t < 200; ++t) {
        const double x = rng.uniform();
        const double before = ema.current;
        update_ema(ema, x);
        REQUIRE(ema.current >= std::min(before, x) - 1e-15);
        REQUIRE(ema.current <= std::max(before, x) + 1e-15);
    }
}

TEST_CASE("zero plateau converges, zero-to-positive defers", "[metrics]") {
    PrevalenceEma ema;
    bool converged = false;
    for (int t = 0; t < ema.warmup + 2 && !converged; ++t) converged = update_ema(ema, 0.0);
    REQUIRE(converged);

    PrevalenceEma late;
    late.updates = 40;  // past warmup with a zero average so far
    REQUIRE_FALSE(update_ema(late, 0.2));  // previous EMA was 0, test deferred
    REQUIRE(late.current > 0.0);
}

TEST_CASE("reduction arithmetic", "[metrics]") {
    REQUIRE(reduction(0.04, 0.0) == 1.0);
    REQUIRE(reduction(0.04, 0.04) == 0.0);
    REQUIRE(reduction(0.05, 0.02) == Catch::Approx(0.6));
    REQUIRE(reduction(0.05, 0.06) < 0.0);
    REQUIRE_THROWS_AS(reduction(0.0, 0.1), ParamError);
}

TEST_CASE("exposure counters keep impressions at or above reach", "[metrics]") {
    ExposureCounters counters(4);
    counters.record_illegal_delivery(0);
    counters.record_illegal_delivery(0);
    counters.record_illegal_delivery(2);
    REQUIRE(counters.impressions == 3);
    REQUIRE(counters.reach == 2);
    REQUIRE(counters.impressions >= counters.reach);
}
