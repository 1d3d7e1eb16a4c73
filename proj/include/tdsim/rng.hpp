#pragma once

#include <cstdint>
#include <random>

namespace tdsim {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic random stream. A given seed produces the same draw sequence
/// on every run of the same build; forked streams depend only on (seed, tag),
/// not on how many draws were consumed from the parent.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53-bit resolution, independent of library internals.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Rejection sampling keeps it unbiased.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Child stream identified by tag alone; consuming draws from the parent
    // does not shift it.
    RandomStream fork(std::uint64_t tag) const {
        return RandomStream(splitmix64(seed_ ^ splitmix64(tag)));
    }

    std::uint64_t seed() const { return seed_; }

    // For one-off use of std::<distribution> at setup time. Step-loop draws
    // must go through uniform()/uniform_int() so stream alignment between
    // paired runs is under our control.
    std::mt19937_64& engine() { return gen_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

inline RandomStream seed_rng(std::uint64_t seed) { return RandomStream(seed); }

/// Counter-style uniform in [0,1) keyed by (seed, a, b). Used where the draw
/// for an entity must not depend on how many other entities drew before it.
inline double hashed_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    const std::uint64_t h = splitmix64(splitmix64(seed ^ a) + b);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace tdsim
