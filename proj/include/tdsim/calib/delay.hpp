#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "tdsim/calib/records.hpp"
#include "tdsim/error.hpp"

namespace tdsim::calib {

/// Takedown delays (whole days) for one platform/category group, with the
/// empirical complementary CDF evaluated at every integer t from 0 to
/// max_delay + 1. ccdf[t] = P(delay >= t); ccdf[0] = 1.
struct DelayDistribution {
    std::string platform;
    std::string category;  // empty = all categories pooled
    std::vector<std::int64_t> delays;
    std::vector<double> ccdf;

    std::size_t n() const { return delays.size(); }
};

inline DelayDistribution delays_and_ccdf(std::span<const ModerationRecord> records,
                                         std::string platform = {},
                                         std::string category = {}) {
    if (records.empty()) throw DataError("delays_and_ccdf: no records");
    DelayDistribution dist;
    dist.platform = std::move(platform);
    dist.category = std::move(category);
    dist.delays.reserve(records.size());
    std::int64_t max_delay = 0;
    for (const auto& r : records) {
        const std::int64_t d = r.delay_days();
        dist.delays.push_back(d);
        max_delay = std::max(max_delay, d);
    }
    std::sort(dist.delays.begin(), dist.delays.end());

    // Survival counts by downward sweep: #(delay >= t).
    std::vector<std::size_t> at(static_cast<std::size_t>(max_delay) + 1, 0);
    for (std::int64_t d : dist.delays) ++at[static_cast<std::size_t>(d)];
    dist.ccdf.assign(static_cast<std::size_t>(max_delay) + 2, 0.0);
    std::size_t tail = 0;
    const double n = static_cast<double>(dist.delays.size());
    for (std::int64_t t = max_delay; t >= 0; --t) {
        tail += at[static_cast<std::size_t>(t)];
        dist.ccdf[static_cast<std::size_t>(t)] = static_cast<double>(tail) / n;
    }
    return dist;
}

inline DelayDistribution delays_from_values(std::vector<std::int64_t> delays,
                                            std::string platform = {},
                                            std::string category = {}) {
    std::vector<ModerationRecord> recs(delays.size());
    for (std::size_t i = 0; i < delays.size(); ++i) {
        recs[i].content_date = 0;
        recs[i].application_date = delays[i];
    }
    return delays_and_ccdf(recs, std::move(platform), std::move(category));
}

/// Plot-ready CCDF points, one "t<tab>ccdf" row per integer t.
inline void save_ccdf(const DelayDistribution& dist, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write ccdf file: " + path);
    out << "t\tccdf\n";
    char buf[64];
    for (std::size_t t = 0; t < dist.ccdf.size(); ++t) {
        std::snprintf(buf, sizeof(buf), "%zu\t%.17g\n", t, dist.ccdf[t]);
        out << buf;
    }
}

}  // namespace tdsim::calib
