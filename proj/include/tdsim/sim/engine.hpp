#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tdsim/error.hpp"
#include "tdsim/network.hpp"
#include "tdsim/rng.hpp"
#include "tdsim/sampling.hpp"
#include "tdsim/sim/metrics.hpp"
#include "tdsim/types.hpp"

namespace tdsim::sim {

/// Full state of one simulation run. Messages are append-only; a message id
/// doubles as its index. Baseline runs keep removal_prob at 0.
struct SimState {
    SimConfig config;
    std::int32_t t = 0;
    std::vector<Agent> agents;
    std::vector<Message> messages;
    std::vector<MessageId> live_illegal;  // unremoved illegal messages
    double removal_prob = 0.0;
    RandomStream rng;
    std::uint64_t removal_seed = 0;
    std::vector<std::vector<AgentId>> followers;
    ExposureCounters exposure;

    std::uint32_t removed_this_step = 0;
    std::vector<std::int32_t> removed_lifetimes;
    std::uint64_t legal_created = 0;
    std::uint64_t illegal_created = 0;

    // Optional sink for (recipient, message) pairs of illegal deliveries.
    std::vector<std::pair<AgentId, MessageId>>* delivery_log = nullptr;

    std::vector<std::pair<AgentId, MessageId>> share_events;  // scratch, kept across steps
    std::vector<double> recency_weights;                      // decay^rank table
    std::vector<double> weight_scratch;

    explicit SimState(RandomStream stream) : rng(stream), exposure(0) {}
};

/// Build agents and adjacency. Activities come from the bounded power law,
/// illegal posting probabilities from the caller (one per agent). Removal
/// draws use a stream keyed by the master seed only, so baseline and removal
/// runs sharing a seed see identical main-stream randomness.
inline SimState init_state(const SimConfig& config, const FollowerNetwork& network,
                           std::span<const double> illegal_probs) {
    if (network.n_nodes < 1) throw ParamError("init_state: empty network");
    if (illegal_probs.size() != network.n_nodes) {
        throw ParamError("init_state: need one illegal_prob per agent");
    }
    if (config.feed_capacity < 1) throw ParamError("init_state: feed_capacity must be >= 1");
    SimState state{RandomStream(config.seed)};
    state.config = config;
    const double a_max = config.a_max > 0.0 ? config.a_max
                                            : static_cast<double>(network.n_nodes);
    state.agents.resize(network.n_nodes);
    for (AgentId i = 0; i < network.n_nodes; ++i) {
        auto& agent = state.agents[i];
        agent.id = i;
        agent.activity = sample_activity(state.rng, config.gamma, config.a_min, a_max);
        const double p = illegal_probs[i];
        if (!(p >= 0.0 && p <= 1.0)) throw ParamError("init_state: illegal_prob outside [0,1]");
        agent.illegal_prob = p;
        agent.feed.reserve(config.feed_capacity + 1);
    }
    state.followers = network.followers_of();
    state.removal_prob = config.tau > 0.0 ? -std::expm1(-1.0 / config.tau) : 0.0;
    state.removal_seed = splitmix64(config.seed ^ 0x7461752d64726177ULL);
    state.exposure = ExposureCounters(network.n_nodes);
    state.recency_weights.resize(config.feed_capacity);
    for (std::size_t r = 0; r < config.feed_capacity; ++r) {
        state.recency_weights[r] = config.use_recency ? std::pow(config.recency_decay,
                                                                 static_cast<double>(r))
                                                      : 1.0;
    }
    return state;
}

namespace detail {

inline void deliver(SimState& state, AgentId recipient, MessageId mid) {
    const Message& msg = state.messages[mid];
    if (recipient == msg.author) return;  // authors keep their own posts out of feed
    auto& feed = state.agents[recipient].feed;
    auto it = std::find(feed.begin(), feed.end(), mid);
    if (it != feed.end()) {
        // Re-delivery refreshes arrival rank instead of duplicating.
        feed.erase(it);
    }
    feed.insert(feed.begin(), mid);
    if (feed.size() > state.config.feed_capacity) feed.pop_back();
    if (msg.illegal) {
        state.exposure.record_illegal_delivery(recipient);
        if (state.delivery_log) state.delivery_log->emplace_back(recipient, mid);
    }
}

inline MessageId pick_reshare(SimState& state, const std::vector<MessageId>& feed, double u) {
    double total = 0.0;
    auto& weights = state.weight_scratch;
    weights.resize(feed.size());
    for (std::size_t r = 0; r < feed.size(); ++r) {
        const Message& m = state.messages[feed[r]];
        double w = state.recency_weights[r];
        if (state.config.use_appeal) w *= m.appeal;
        switch (state.config.popularity) {
            case PopularityMode::Off: break;
            case PopularityMode::Linear:
                w *= 1.0 + static_cast<double>(m.reshare_count);
                break;
            case PopularityMode::Log:
                w *= 1.0 + std::log2(1.0 + static_cast<double>(m.reshare_count));
                break;
        }
        weights[r] = w;
        total += w;
    }
    double x = u * total;
    for (std::size_t r = 0; r + 1 < feed.size(); ++r) {
        x -= weights[r];
        if (x < 0.0) return feed[r];
    }
    return feed.back();
}

inline void erase_from_all_feeds(SimState& state, MessageId mid) {
    for (auto& agent : state.agents) {
        auto it = std::find(agent.feed.begin(), agent.feed.end(), mid);
        if (it != agent.feed.end()) agent.feed.erase(it);
    }
}

}  // namespace detail

/// Advance one timestep: draw actions, execute posts/reshares, deliver shares
/// to followers, then run the removal sweep over live illegal content.
///
/// Stream discipline: every action consumes a fixed number of main-stream
/// draws (1 post-vs-reshare draw, then 2 for a post or 1 for a reshare, the
/// reshare draw consumed even when the feed is empty), and removal uses
/// per-(message, step) hashed draws. Paired runs that differ only in tau
/// therefore create identical message populations.
inline void step(SimState& state) {
    state.share_events.clear();
    state.removed_this_step = 0;

    for (auto& agent : state.agents) {
        std::uint32_t n_actions;
        if (agent.activity < 1.0) {
            n_actions = state.rng.uniform() < agent.activity ? 1 : 0;
        } else {
            n_actions = static_cast<std::uint32_t>(agent.activity);
        }
        for (std::uint32_t k = 0; k < n_actions; ++k) {
            if (state.rng.uniform() < state.config.mu_post) {
                Message msg;
                msg.id = static_cast<MessageId>(state.messages.size());
                msg.author = agent.id;
                msg.created_at = state.t;
                msg.illegal = state.rng.uniform() < agent.illegal_prob;
                msg.appeal = sample_appeal(state.rng);
                state.messages.push_back(msg);
                if (msg.illegal) {
                    state.live_illegal.push_back(msg.id);
                    ++state.illegal_created;
                } else {
                    ++state.legal_created;
                }
                state.share_events.emplace_back(agent.id, msg.id);
            } else {
                const double u = state.rng.uniform();
                if (agent.feed.empty()) continue;  // nothing to reshare, action lapses
                const MessageId mid = detail::pick_reshare(state, agent.feed, u);
                ++state.messages[mid].reshare_count;
                state.share_events.emplace_back(agent.id, mid);
            }
        }
    }

    for (const auto& [sharer, mid] : state.share_events) {
        for (AgentId follower : state.followers[sharer]) {
            detail::deliver(state, follower, mid);
        }
    }

    if (state.removal_prob > 0.0) {
        auto& pool = state.live_illegal;
        for (std::size_t i = 0; i < pool.size();) {
            const MessageId mid = pool[i];
            const double u = hashed_uniform(state.removal_seed, mid,
                                            static_cast<std::uint64_t>(state.t));
            if (u < state.removal_prob) {
                Message& msg = state.messages[mid];
                msg.removed = true;
                msg.removed_at = state.t;
                state.removed_lifetimes.push_back(state.t - msg.created_at);
                ++state.removed_this_step;
                detail::erase_from_all_feeds(state, mid);
                pool[i] = pool.back();
                pool.pop_back();
            } else {
                ++i;
            }
        }
    }
    ++state.t;
}

/// Mean over agents of the illegal fraction of their feed; empty feeds count 0.
inline double prevalence(const SimState& state) {
    double sum = 0.0;
    for (const auto& agent : state.agents) {
        if (agent.feed.empty()) continue;
        std::size_t illegal = 0;
        for (MessageId mid : agent.feed) illegal += state.messages[mid].illegal ? 1 : 0;
        sum += static_cast<double>(illegal) / static_cast<double>(agent.feed.size());
    }
    return sum / static_cast<double>(state.agents.size());
}

/// Throws on any violated feed invariant. Test support.
inline void check_feed_invariants(const SimState& state) {
    for (const auto& agent : state.agents) {
        if (agent.feed.size() > state.config.feed_capacity) {
            throw std::logic_error("feed above capacity");
        }
        for (std::size_t i = 0; i < agent.feed.size(); ++i) {
            if (state.messages[agent.feed[i]].removed) {
                throw std::logic_error("removed message present in feed");
            }
            for (std::size_t j = i + 1; j < agent.feed.size(); ++j) {
                if (agent.feed[i] == agent.feed[j]) throw std::logic_error("duplicate in feed");
            }
        }
    }
}

struct RunResult {
    bool converged = false;
    int steps = 0;
    double final_ema = 0.0;
    std::uint64_t impressions = 0;
    std::uint64_t reach = 0;
    std::uint64_t legal_created = 0;
    std::uint64_t illegal_created = 0;
    std::vector<double> prevalence_trace;
    std::vector<std::uint64_t> impressions_trace;
    std::vector<std::uint64_t> reach_trace;
    std::vector<std::uint32_t> live_illegal_trace;
    std::vector<std::uint32_t> removed_trace;
    std::vector<std::int32_t> removed_lifetimes;
};

/// Run until the prevalence moving average converges or config.max_steps is
/// hit (reported as converged = false, never an error).
inline RunResult run_until_converged(const SimConfig& config, const FollowerNetwork& network,
                                     std::span<const double> illegal_probs) {
    if (network.n_nodes < 2) throw ParamError("run_until_converged: need >= 2 nodes");
    SimState state = init_state(config, network, illegal_probs);
    PrevalenceEma ema{config.rho, config.epsilon, config.warmup};

    RunResult result;
    for (int s = 0; s < config.max_steps; ++s) {
        step(state);
        const double prev = prevalence(state);
        result.prevalence_trace.push_back(prev);
        result.impressions_trace.push_back(state.exposure.impressions);
        result.reach_trace.push_back(state.exposure.reach);
        result.live_illegal_trace.push_back(static_cast<std::uint32_t>(state.live_illegal.size()));
        result.removed_trace.push_back(state.removed_this_step);
        if (update_ema(ema, prev)) {
            result.converged = true;
            break;
        }
    }
    result.steps = state.t;
    result.final_ema = ema.current;
    result.impressions = state.exposure.impressions;
    result.reach = state.exposure.reach;
    result.legal_created = state.legal_created;
    result.illegal_created = state.illegal_created;
    result.removed_lifetimes = std::move(state.removed_lifetimes);
    return result;
}

/// Lifetime histogram of removed illegal content, pairs (lifetime, count)
/// sorted by lifetime. A lifetime of 0 means removed in the creation step.
inline std::vector<std::pair<std::int32_t, std::size_t>> survival_curve_of_removed(
    std::span<const std::int32_t> lifetimes, std::size_t min_removals = 10000) {
    if (lifetimes.size() < min_removals) {
        throw DataError("survival_curve_of_removed: only " + std::to_string(lifetimes.size()) +
                        " removals logged, need " + std::to_string(min_removals));
    }
    std::vector<std::int32_t> sorted(lifetimes.begin(), lifetimes.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<std::int32_t, std::size_t>> hist;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        hist.emplace_back(sorted[i], j - i);
        i = j;
    }
    return hist;
}

/// Per-step trace in the documented column layout.
inline void save_trace(const RunResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write trace: " + path);
    out << "t\tprevalence\tcumulative_impressions\treach\tlive_illegal\tremoved_this_step\n";
    char buf[160];
    for (std::size_t i = 0; i < result.prevalence_trace.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu\t%.17g\t%llu\t%llu\t%u\t%u\n", i,
                      result.prevalence_trace[i],
                      static_cast<unsigned long long>(result.impressions_trace[i]),
                      static_cast<unsigned long long>(result.reach_trace[i]),
                      result.live_illegal_trace[i], result.removed_trace[i]);
        out << buf;
    }
}

}  // namespace tdsim::sim
