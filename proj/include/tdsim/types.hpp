#pragma once

#include <cstdint>
#include <vector>

namespace tdsim {

using AgentId = std::uint32_t;
using MessageId = std::uint32_t;

/// One unit of content. Ids are assigned in creation order and never reused.
struct Message {
    MessageId id = 0;
    AgentId author = 0;
    std::int32_t created_at = 0;   // timestep of creation, 1 step = 1 day
    std::int32_t removed_at = -1;  // timestep of removal, -1 while live
    double appeal = 1.0;           // in (0, 1]
    bool illegal = false;
    bool removed = false;
    std::uint32_t reshare_count = 0;
};

/// A user account. `feed` holds message ids, newest arrival first.
struct Agent {
    AgentId id = 0;
    double activity = 0.0;      // expected (re)shares per timestep
    double illegal_prob = 0.0;  // probability an authored message is illegal
    std::vector<MessageId> feed;
};

/// How message popularity enters the reshare weight.
enum class PopularityMode { Off, Linear, Log };

/// Parameters of a single simulation run. tau <= 0 means baseline (no removal).
struct SimConfig {
    double gamma = 2.85;        // activity power-law exponent
    double mu_post = 0.5;       // P(action is an original post), else reshare
    std::size_t feed_capacity = 15;
    double a_min = 0.1;         // activity lower bound
    double a_max = 0.0;         // activity upper bound; 0 = number of agents
    double tau = 0.0;           // expected takedown delay in days; 0 = baseline
    std::uint64_t seed = 0;

    // Convergence of the prevalence moving average.
    double rho = 0.9;
    double epsilon = 1e-4;
    int warmup = 20;
    int max_steps = 5000;

    // Reshare-weight factors, individually switchable for ablation.
    // Popularity is log-damped by default: the linear 1 + reshare_count form
    // lets early winners monopolize every reshare, which starves rare content
    // classes of diffusion entirely.
    bool use_appeal = true;
    PopularityMode popularity = PopularityMode::Log;
    bool use_recency = true;
    double recency_decay = 0.9;  // weight multiplier per feed rank, newest rank 0
};

}  // namespace tdsim
