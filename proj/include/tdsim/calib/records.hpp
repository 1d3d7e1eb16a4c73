#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tdsim/error.hpp"

namespace tdsim::calib {

enum class DecisionGround { Illegal, Incompatible, Other };

/// One moderation decision, as exported from a transparency records dump.
/// Dates are stored as days since 1970-01-01.
struct ModerationRecord {
    std::string platform;
    std::int64_t content_date = 0;
    std::int64_t application_date = 0;
    DecisionGround ground = DecisionGround::Other;
    std::string category;

    std::int64_t delay_days() const { return application_date - content_date; }
};

struct IngestReport {
    std::size_t rows_total = 0;
    std::size_t kept = 0;
    std::size_t excluded_platform = 0;
    std::size_t excluded_ground = 0;
    std::size_t excluded_sentinel_date = 0;
    std::size_t excluded_negative_delay = 0;
    std::size_t excluded_bad_date = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// ISO YYYY-MM-DD to days since epoch, or nullopt if malformed.
inline std::optional<std::int64_t> parse_date(std::string_view s) {
    s = trim(s);
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    int y, m, d;
    auto num = [&](std::size_t pos, std::size_t len, int& out) {
        auto r = std::from_chars(s.data() + pos, s.data() + pos + len, out);
        return r.ec == std::errc{} && r.ptr == s.data() + pos + len;
    };
    if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return std::nullopt;
    using namespace std::chrono;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd}.time_since_epoch().count();
}

inline DecisionGround parse_ground(std::string_view s) {
    const std::string v = lower(trim(s));
    if (v == "illegal" || v == "decision_ground_illegal_content") return DecisionGround::Illegal;
    if (v == "incompatible" || v == "decision_ground_incompatible_content") {
        return DecisionGround::Incompatible;
    }
    return DecisionGround::Other;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace detail

// 2000-01-01: known placeholder for unknown content creation dates.
inline constexpr std::int64_t kSentinelContentDate = 10957;

/// Parse a delimited records file (comma or tab, sniffed from the header).
/// Required columns: platform, content_date, application_date,
/// decision_ground, category. Rows failing a filter are counted by reason.
inline std::vector<ModerationRecord> ingest_records(const std::string& path,
                                                    const std::string& platform_filter,
                                                    bool require_illegal_ground,
                                                    IngestReport* report = nullptr) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open records file: " + path);

    std::string header;
    if (!std::getline(in, header)) throw DataError(path + ": empty file");
    const char sep = header.find('\t') != std::string::npos ? '\t' : ',';

    auto cols = detail::split(header, sep);
    auto col_index = [&](std::string_view name) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (detail::lower(detail::trim(cols[i])) == name) return static_cast<int>(i);
        }
        throw DataError(path + ": missing required column '" + std::string(name) + "'");
    };
    const int c_platform = col_index("platform");
    const int c_content = col_index("content_date");
    const int c_applied = col_index("application_date");
    const int c_ground = col_index("decision_ground");
    const int c_category = col_index("category");
    const std::size_t need =
        static_cast<std::size_t>(std::max({c_platform, c_content, c_applied, c_ground,
                                           c_category})) + 1;

    const std::string platform_lc = detail::lower(platform_filter);
    std::vector<ModerationRecord> records;
    IngestReport rep;
    std::string line;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        ++rep.rows_total;
        auto fields = detail::split(line, sep);
        if (fields.size() < need) {
            ++rep.excluded_bad_date;  // structurally short row, same bucket as unparseable
            continue;
        }
        ModerationRecord rec;
        rec.platform = std::string(detail::trim(fields[c_platform]));
        if (!platform_lc.empty() && detail::lower(rec.platform) != platform_lc) {
            ++rep.excluded_platform;
            continue;
        }
        rec.ground = detail::parse_ground(fields[c_ground]);
        if (require_illegal_ground && rec.ground != DecisionGround::Illegal) {
            ++rep.excluded_ground;
            continue;
        }
        auto content = detail::parse_date(fields[c_content]);
        auto applied = detail::parse_date(fields[c_applied]);
        if (!content || !applied) {
            ++rep.excluded_bad_date;
            continue;
        }
        if (*content == kSentinelContentDate) {
            ++rep.excluded_sentinel_date;
            continue;
        }
        if (*applied < *content) {
            ++rep.excluded_negative_delay;
            continue;
        }
        rec.content_date = *content;
        rec.application_date = *applied;
        rec.category = std::string(detail::trim(fields[c_category]));
        records.push_back(std::move(rec));
        ++rep.kept;
    }
    if (report) *report = rep;
    return records;
}

}  // namespace tdsim::calib
