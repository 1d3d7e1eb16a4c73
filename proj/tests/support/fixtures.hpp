#pragma once

// Synthetic moderation-record fixtures with exponential takedown delays,
// floored to whole days the way calendar-date differences are.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "tdsim/rng.hpp"

namespace fixtures {

inline std::int64_t exponential_day_delay(double tau, tdsim::RandomStream& rng) {
    const double u = rng.uniform();
    return static_cast<std::int64_t>(-tau * std::log1p(-u));
}

struct DelayGroup {
    std::string platform;
    std::string category;
    double tau;
    std::size_t n;
};

// Days since epoch for 2024-01-01; fixtures spread content dates over a year.
inline constexpr std::int64_t kContentEpoch = 19723;

inline std::string iso_date(std::int64_t days_since_epoch) {
    // Civil-from-days (Howard Hinnant's algorithm), enough for fixture output.
    std::int64_t z = days_since_epoch + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const std::int64_t doe = z - era * 146097;
    const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = yoe + era * 400;
    const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const std::int64_t mp = (5 * doy + 2) / 153;
    const std::int64_t d = doy - (153 * mp + 2) / 5 + 1;
    const std::int64_t m = mp < 10 ? mp + 3 : mp - 9;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04lld-%02lld-%02lld",
                  static_cast<long long>(m <= 2 ? y + 1 : y), static_cast<long long>(m),
                  static_cast<long long>(d));
    return buf;
}

/// Write a records file with one group of rows per entry; delays are i.i.d.
/// floor(Exp(tau)) in days.
inline void write_delay_fixture(const std::string& path, const std::vector<DelayGroup>& groups,
                                std::uint64_t seed) {
    tdsim::RandomStream rng(seed);
    std::ofstream out(path);
    out << "platform,content_date,application_date,decision_ground,category\n";
    for (const auto& g : groups) {
        for (std::size_t i = 0; i < g.n; ++i) {
            const std::int64_t content = kContentEpoch + static_cast<std::int64_t>(i % 365);
            const std::int64_t applied = content + exponential_day_delay(g.tau, rng);
            out << g.platform << "," << iso_date(content) << "," << iso_date(applied)
                << ",illegal," << g.category << "\n";
        }
    }
}

}  // namespace fixtures
