#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tdsim/calib/delay.hpp"
#include "tdsim/calib/records.hpp"
#include "tdsim/error.hpp"

namespace tdsim::calib {

enum class FitMethod { LogCcdfLeastSquares, Mle };

inline const char* to_string(FitMethod m) {
    return m == FitMethod::Mle ? "mle" : "logccdf-ls";
}

/// Exponential survival fit P(t) = exp(-t / tau_hat).
struct TauFit {
    double tau_hat = 0.0;
    FitMethod method = FitMethod::LogCcdfLeastSquares;
    double fit_t_min = 0.0;
    double fit_t_max = 0.0;
    double r_squared = std::numeric_limits<double>::quiet_NaN();  // logccdf-ls only
    std::size_t n = 0;
};

struct FitOptions {
    FitMethod method = FitMethod::LogCcdfLeastSquares;
    // Fit window in days; NaN bounds resolve to [0, 95th percentile delay].
    // The head of the distribution carries the exponential signal; deep tails
    // of real moderation data are heavier than exponential.
    double t_min = std::numeric_limits<double>::quiet_NaN();
    double t_max = std::numeric_limits<double>::quiet_NaN();
    std::size_t min_samples = 30;
};

namespace detail {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
};

inline LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

}  // namespace detail

/// Fit tau directly from CCDF points (t, P(>=t)). Only strictly positive,
/// strictly decreasing-capable points inside [t_min, t_max] enter the fit.
inline TauFit fit_tau_from_ccdf(std::span<const double> ccdf, double t_min, double t_max,
                                std::size_t n_samples) {
    std::vector<double> xs, ys;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < ccdf.size(); ++t) {
        const double p = ccdf[t];
        if (p > prev + 1e-12) throw DataError("fit_tau: ccdf is not non-increasing");
        prev = p;
        const double td = static_cast<double>(t);
        if (td < t_min || td > t_max || p <= 0.0) continue;
        xs.push_back(td);
        ys.push_back(std::log(p));
    }
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (i == 0 || ys[i] != ys[i - 1]) ++distinct;
    }
    if (xs.size() < 3 || distinct < 2) {
        throw DataError("fit_tau: fewer than 3 usable ccdf points in fit range");
    }
    const auto line = detail::least_squares(xs, ys);
    if (!(line.slope < 0.0)) {
        throw DataError("fit_tau: non-negative log-ccdf slope, no exponential decay in range");
    }
    TauFit fit;
    fit.tau_hat = -1.0 / line.slope;
    fit.method = FitMethod::LogCcdfLeastSquares;
    fit.fit_t_min = xs.front();
    fit.fit_t_max = xs.back();
    fit.r_squared = line.r_squared;
    fit.n = n_samples;
    return fit;
}

inline TauFit fit_tau(const DelayDistribution& dist, FitOptions opt = {}) {
    if (dist.n() < opt.min_samples) {
        throw DataError("fit_tau: need at least " + std::to_string(opt.min_samples) +
                        " samples, got " + std::to_string(dist.n()));
    }
    double t_min = opt.t_min, t_max = opt.t_max;
    if (std::isnan(t_min)) t_min = 0.0;
    if (std::isnan(t_max)) {
        const auto& d = dist.delays;  // sorted
        t_max = static_cast<double>(d[(d.size() * 95) / 100]);
    }

    if (opt.method == FitMethod::Mle) {
        // Sample mean plus half a day: delays are floored to whole days, so the
        // mean of the underlying continuous delay sits about 0.5 above it.
        const double sum = std::accumulate(dist.delays.begin(), dist.delays.end(), 0.0);
        TauFit fit;
        fit.tau_hat = sum / static_cast<double>(dist.n()) + 0.5;
        fit.method = FitMethod::Mle;
        fit.fit_t_min = 0.0;
        fit.fit_t_max = static_cast<double>(dist.delays.back());
        fit.n = dist.n();
        return fit;
    }
    return fit_tau_from_ccdf(dist.ccdf, t_min, t_max, dist.n());
}

/// One row of the per-category fit report. Groups below the sample-size
/// minimum are listed with fitted = false.
struct CategoryFit {
    std::string platform;
    std::string category;
    std::size_t n = 0;
    bool fitted = false;
    TauFit logccdf_ls;
    TauFit mle;
};

inline std::vector<CategoryFit> fit_tau_by_category(std::span<const ModerationRecord> records,
                                                    FitOptions opt = {}) {
    std::map<std::pair<std::string, std::string>, std::vector<ModerationRecord>> groups;
    for (const auto& r : records) groups[{r.platform, r.category}].push_back(r);

    std::vector<CategoryFit> out;
    for (auto& [key, recs] : groups) {
        CategoryFit row;
        row.platform = key.first;
        row.category = key.second;
        row.n = recs.size();
        if (recs.size() >= opt.min_samples) {
            auto dist = delays_and_ccdf(recs, key.first, key.second);
            try {
                FitOptions ls = opt;
                ls.method = FitMethod::LogCcdfLeastSquares;
                row.logccdf_ls = fit_tau(dist, ls);
                FitOptions mle = opt;
                mle.method = FitMethod::Mle;
                row.mle = fit_tau(dist, mle);
                row.fitted = true;
            } catch (const DataError&) {
                row.fitted = false;  // degenerate group (e.g. all-equal delays)
            }
        }
        out.push_back(std::move(row));
    }
    // Observations descending within platform, the usual report order.
    std::stable_sort(out.begin(), out.end(), [](const CategoryFit& a, const CategoryFit& b) {
        if (a.platform != b.platform) return a.platform < b.platform;
        return a.n > b.n;
    });
    return out;
}

inline void save_fit_report(std::span<const CategoryFit> rows, std::ostream& out) {
    out << "platform\tcategory\tn\ttau_logls\tr2\ttau_mle\n";
    char buf[160];
    for (const auto& row : rows) {
        if (row.fitted) {
            std::snprintf(buf, sizeof(buf), "%zu\t%.17g\t%.17g\t%.17g\n", row.n,
                          row.logccdf_ls.tau_hat, row.logccdf_ls.r_squared, row.mle.tau_hat);
        } else {
            std::snprintf(buf, sizeof(buf), "%zu\tskipped\tskipped\tskipped\n", row.n);
        }
        out << row.platform << "\t" << (row.category.empty() ? "all" : row.category) << "\t"
            << buf;
    }
}

inline void save_fit_report(std::span<const CategoryFit> rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write fit report: " + path);
    save_fit_report(rows, out);
}

}  // namespace tdsim::calib
