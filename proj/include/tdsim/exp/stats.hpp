#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "tdsim/error.hpp"
#include "tdsim/rng.hpp"

namespace tdsim::exp {

/// Percentile bootstrap interval for the mean.
inline std::pair<double, double> bootstrap_ci(std::span<const double> samples,
                                              RandomStream& rng, std::size_t n_resamples = 10000,
                                              double level = 0.95) {
    if (samples.size() < 2) throw DataError("bootstrap_ci: need at least 2 samples");
    if (!(level > 0.0 && level < 1.0)) throw ParamError("bootstrap_ci: level outside (0,1)");
    std::vector<double> means(n_resamples);
    const std::size_t n = samples.size();
    for (auto& m : means) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += samples[rng.uniform_int(n)];
        m = sum / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(n_resamples - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, n_resamples - 1);
        const double frac = pos - static_cast<double>(lo);
        return means[lo] * (1.0 - frac) + means[hi] * frac;
    };
    const double alpha = (1.0 - level) / 2.0;
    return {quantile(alpha), quantile(1.0 - alpha)};
}

namespace detail {

// Midranks of the pooled sample; ties share the average rank.
inline std::vector<double> midranks(std::span<const double> pooled) {
    std::vector<std::size_t> order(pooled.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<double> ranks(pooled.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && pooled[order[j]] == pooled[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j - 1) + 1.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
        i = j;
    }
    return ranks;
}

inline double u_from_ranks(std::span<const double> ranks, std::span<const std::size_t> members,
                           std::size_t n1) {
    double rank_sum = 0.0;
    for (std::size_t idx : members) rank_sum += ranks[idx];
    return rank_sum - static_cast<double>(n1 * (n1 + 1)) / 2.0;
}

inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace detail

struct MannWhitneyResult {
    double u = 0.0;
    double p_value = 1.0;  // two-sided
    bool exact = false;
};

/// Two-sided Mann-Whitney U test. Group sizes up to `exact_limit` each use
/// exact enumeration of all group assignments (the permutation distribution
/// of U is symmetric about n1*n2/2, with or without ties); larger groups use
/// the tie-corrected normal approximation with continuity correction.
inline MannWhitneyResult mann_whitney(std::span<const double> group1,
                                      std::span<const double> group2,
                                      std::size_t exact_limit = 8) {
    const std::size_t n1 = group1.size(), n2 = group2.size();
    if (n1 < 3 || n2 < 3) throw DataError("mann_whitney: each group needs >= 3 samples");

    std::vector<double> pooled(group1.begin(), group1.end());
    pooled.insert(pooled.end(), group2.begin(), group2.end());
    const auto ranks = detail::midranks(pooled);

    std::vector<std::size_t> members(n1);
    std::iota(members.begin(), members.end(), 0);
    const double u_obs = detail::u_from_ranks(ranks, members, n1);
    const double mu = static_cast<double>(n1 * n2) / 2.0;
    const double dev_obs = std::abs(u_obs - mu);

    MannWhitneyResult res;
    res.u = u_obs;
    if (n1 <= exact_limit && n2 <= exact_limit) {
        // Walk all C(n1+n2, n1) subsets of pooled indices.
        const std::size_t n = n1 + n2;
        std::vector<std::size_t> comb(n1);
        std::iota(comb.begin(), comb.end(), 0);
        auto advance = [&]() {
            for (std::size_t i = n1; i-- > 0;) {
                if (comb[i] < n - n1 + i) {
                    ++comb[i];
                    for (std::size_t j = i + 1; j < n1; ++j) comb[j] = comb[j - 1] + 1;
                    return true;
                }
            }
            return false;
        };
        std::uint64_t total = 0, extreme = 0;
        do {
            const double u = detail::u_from_ranks(ranks, comb, n1);
            ++total;
            if (std::abs(u - mu) >= dev_obs - 1e-12) ++extreme;
        } while (advance());
        res.p_value = static_cast<double>(extreme) / static_cast<double>(total);
        res.exact = true;
        return res;
    }

    // Tie correction over pooled value multiplicities.
    std::vector<double> sorted(pooled);
    std::sort(sorted.begin(), sorted.end());
    double tie_sum = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_sum += t * t * t - t;
        i = j;
    }
    const double n = static_cast<double>(n1 + n2);
    const double var = (static_cast<double>(n1) * static_cast<double>(n2) / 12.0) *
                       ((n + 1.0) - tie_sum / (n * (n - 1.0)));
    if (var <= 0.0) {
        res.p_value = 1.0;  // all values tied
        return res;
    }
    const double z = std::max(0.0, dev_obs - 0.5) / std::sqrt(var);
    res.p_value = 2.0 * detail::std_normal_cdf(-z);
    return res;
}

struct PairwiseTest {
    std::size_t group_a = 0;
    std::size_t group_b = 0;
    double u = 0.0;
    double p_raw = 1.0;
    double p_adjusted = 1.0;
    bool significant = false;
};

/// All pairwise U tests with Bonferroni correction (factor = number of pairs).
inline std::vector<PairwiseTest> mann_whitney_bonferroni(
    std::span<const std::vector<double>> groups, double alpha = 0.05) {
    if (groups.size() < 2) throw DataError("mann_whitney_bonferroni: need >= 2 groups");
    const std::size_t n_pairs = groups.size() * (groups.size() - 1) / 2;
    std::vector<PairwiseTest> out;
    for (std::size_t a = 0; a < groups.size(); ++a) {
        for (std::size_t b = a + 1; b < groups.size(); ++b) {
            const auto res = mann_whitney(groups[a], groups[b]);
            PairwiseTest t;
            t.group_a = a;
            t.group_b = b;
            t.u = res.u;
            t.p_raw = res.p_value;
            t.p_adjusted = std::min(1.0, res.p_value * static_cast<double>(n_pairs));
            t.significant = t.p_adjusted < alpha;
            out.push_back(t);
        }
    }
    return out;
}

/// OLS slope of ln(y) on ln(x) with its standard error.
inline std::pair<double, double> loglog_slope(std::span<const double> x,
                                              std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3) {
        throw DataError("loglog_slope: need >= 3 matched points");
    }
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ParamError("loglog_slope: values must be > 0");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) throw DataError("loglog_slope: x values are all equal");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (intercept + slope * lx[i]);
        rss += r * r;
    }
    const double stderr_slope = x.size() > 2 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
    return {slope, stderr_slope};
}

/// Spearman rank correlation (midranks for ties).
inline double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3) throw DataError("spearman: need >= 3 pairs");
    const auto rx = detail::midranks(x);
    const auto ry = detail::midranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

/// Best non-increasing fit in least squares, by pool-adjacent-violators.
inline std::vector<double> isotonic_non_increasing(std::span<const double> y) {
    std::vector<double> level;
    std::vector<double> weight;
    for (double v : y) {
        level.push_back(v);
        weight.push_back(1.0);
        // Merge while the tail violates non-increase.
        while (level.size() > 1 && level[level.size() - 2] < level.back()) {
            const double w = weight[weight.size() - 2] + weight.back();
            const double v2 = (level[level.size() - 2] * weight[weight.size() - 2] +
                               level.back() * weight.back()) / w;
            level.pop_back();
            weight.pop_back();
            level.back() = v2;
            weight.back() = w;
        }
    }
    std::vector<double> fit;
    fit.reserve(y.size());
    for (std::size_t i = 0; i < level.size(); ++i) {
        for (double c = 0.0; c < weight[i]; c += 1.0) fit.push_back(level[i]);
    }
    return fit;
}

/// Pearson chi-square goodness of fit; expected counts below `min_expected`
/// merge into their right neighbour. Returns the p-value.
inline double chi_square_gof(std::span<const double> observed,
                             std::span<const double> expected, double min_expected = 5.0) {
    if (observed.size() != expected.size() || observed.size() < 2) {
        throw DataError("chi_square_gof: need matched histograms with >= 2 bins");
    }
    std::vector<double> obs, exp_;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o_acc += observed[i];
        e_acc += expected[i];
        if (e_acc >= min_expected) {
            obs.push_back(o_acc);
            exp_.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (e_acc > 0.0 || o_acc > 0.0) {
        if (exp_.empty()) throw DataError("chi_square_gof: expected counts too small");
        obs.back() += o_acc;
        exp_.back() += e_acc;
    }
    if (obs.size() < 2) throw DataError("chi_square_gof: fewer than 2 usable bins");
    double stat = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double d = obs[i] - exp_[i];
        stat += d * d / exp_[i];
    }
    boost::math::chi_squared dist(static_cast<double>(obs.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace tdsim::exp
