#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "tdsim/calib/illegal_prob.hpp"
#include "tdsim/error.hpp"
#include "tdsim/exp/stats.hpp"
#include "tdsim/exp/sweep.hpp"
#include "tdsim/net/growth.hpp"
#include "tdsim/net/reduce.hpp"
#include "tdsim/network.hpp"

namespace tdsim::exp {

enum class BatteryKind { PDistributions, HighRiskShare, PValues, NetworkStructure };

inline const char* to_string(BatteryKind k) {
    switch (k) {
        case BatteryKind::PDistributions: return "p-distributions";
        case BatteryKind::HighRiskShare: return "s_H";
        case BatteryKind::PValues: return "p-values";
        case BatteryKind::NetworkStructure: return "network";
    }
    return "?";
}

struct BatterySpec {
    BatteryKind kind = BatteryKind::PDistributions;
    std::vector<double> taus = {2.89, 11.54};
    std::size_t runs_per_variant = 10;
    SimConfig base;
    calib::IllegalProbSpec base_p;  // template for derived variants
    std::uint64_t base_seed = 1;
    std::size_t workers = 0;
    double alpha = 0.05;
    // Optional override of the varied values (s_H fractions or p means).
    std::vector<double> values;
};

struct VariantCell {
    std::string variant;
    double tau = 0.0;
    std::size_t n_runs = 0;
    std::size_t n_nonconverged = 0;
    double mean_reduction = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::vector<double> reductions;
};

struct BatteryPair {
    double tau = 0.0;
    std::string variant_a;
    std::string variant_b;
    double u = 0.0;
    double p_raw = 1.0;
    double p_adjusted = 1.0;
    bool significant = false;
};

struct BatteryReport {
    BatteryKind kind = BatteryKind::PDistributions;
    std::vector<VariantCell> cells;
    std::vector<BatteryPair> pairwise;
    // Scaling of treated vs baseline prevalence across p variants (p-values
    // battery only): slope and stderr of the log-log least-squares fit.
    double scaling_slope = std::numeric_limits<double>::quiet_NaN();
    double scaling_stderr = std::numeric_limits<double>::quiet_NaN();
};

/// Desk-scale analogue of an empirical network reduction: grow a denser,
/// larger substrate, keep its densest core of about the base network's size,
/// then thin edges back to the base average degree.
inline FollowerNetwork core_thinned_variant(const FollowerNetwork& base, RandomStream& rng) {
    const std::uint32_t n_target = base.n_nodes;
    const double avg_deg =
        static_cast<double>(base.n_edges()) / static_cast<double>(base.n_nodes);
    const std::uint32_t k_out = std::max<std::uint32_t>(2, static_cast<std::uint32_t>(2 * avg_deg));
    auto substrate = net::random_walk_growth(2 * n_target, std::min(2 * n_target, k_out + 1),
                                             k_out, 0.5, rng);
    // Largest k whose core still holds at least the target node count.
    std::uint32_t lo = 1, hi = 4 * k_out, best = 1;
    while (lo <= hi) {
        const std::uint32_t mid = lo + (hi - lo) / 2;
        const auto core = net::k_core(substrate, mid);
        if (core.n_nodes >= n_target) {
            best = mid;
            lo = mid + 1;
        } else {
            hi = mid - 1;
        }
    }
    auto core = net::k_core(substrate, best);
    const auto target_edges = std::min<std::size_t>(
        core.n_edges(), static_cast<std::size_t>(avg_deg * core.n_nodes));
    return net::thin_to_density(core, target_edges, rng);
}

inline BatteryReport robustness_battery(const BatterySpec& spec,
                                        const FollowerNetwork& base_network) {
    struct Variant {
        std::string name;
        calib::IllegalProbSpec p;
        const FollowerNetwork* net;
    };
    std::vector<Variant> variants;
    FollowerNetwork alt_network;  // storage for the network battery

    char name[64];
    switch (spec.kind) {
        case BatteryKind::PDistributions: {
            calib::IllegalProbSpec normal = spec.base_p;
            normal.kind = calib::ProbKind::Normal;
            calib::IllegalProbSpec beta = spec.base_p;
            beta.kind = calib::ProbKind::Beta;
            calib::IllegalProbSpec two = spec.base_p;
            two.kind = calib::ProbKind::TwoGroup;
            variants.push_back({"normal", normal, &base_network});
            variants.push_back({"beta", beta, &base_network});
            variants.push_back({"two-group", two, &base_network});
            break;
        }
        case BatteryKind::HighRiskShare: {
            std::vector<double> shares = spec.values.empty()
                                             ? std::vector<double>{1e-3, 1e-2, 1e-1}
                                             : spec.values;
            for (double s : shares) {
                calib::IllegalProbSpec p = spec.base_p;
                p.kind = calib::ProbKind::TwoGroup;
                p.s_h = s;
                std::snprintf(name, sizeof(name), "s_H=%g", s);
                variants.push_back({name, p, &base_network});
            }
            break;
        }
        case BatteryKind::PValues: {
            // Empirical illegal-content probabilities derived from policy-report
            // ratios, smallest one dropped as infeasible at simulation scale.
            std::vector<double> ps = spec.values.empty()
                                         ? std::vector<double>{3e-4, 9e-4, 1e-3, 2e-3, 9e-3}
                                         : spec.values;
            for (double p : ps) {
                std::snprintf(name, sizeof(name), "p=%g", p);
                variants.push_back({name, spec.base_p.with_mean(p), &base_network});
            }
            break;
        }
        case BatteryKind::NetworkStructure: {
            RandomStream net_rng(splitmix64(spec.base_seed ^ 0x6e6574ULL));
            alt_network = core_thinned_variant(base_network, net_rng);
            variants.push_back({"base", spec.base_p, &base_network});
            variants.push_back({"core-thinned", spec.base_p, &alt_network});
            break;
        }
    }

    BatteryReport report;
    report.kind = spec.kind;

    std::vector<std::vector<const VariantCell*>> by_tau(spec.taus.size());
    std::vector<double> variant_baseline_mean(variants.size(), 0.0);
    for (std::size_t v = 0; v < variants.size(); ++v) {
        SweepSpec sw;
        sw.tau_grid = spec.taus;
        sw.runs_per_cell = spec.runs_per_variant;
        sw.base = spec.base;
        sw.p_spec = variants[v].p;
        sw.base_seed = splitmix64(spec.base_seed + 7919 * (v + 1));
        sw.workers = spec.workers;
        const auto sweep = run_sweep(sw, *variants[v].net);
        variant_baseline_mean[v] = sweep.baseline_prevalence_mean;
        for (std::size_t t = 0; t < spec.taus.size(); ++t) {
            const auto& cell = sweep.cell(t, Metric::Prevalence);
            VariantCell vc;
            vc.variant = variants[v].name;
            vc.tau = spec.taus[t];
            vc.n_runs = cell.n_runs;
            vc.n_nonconverged = cell.n_nonconverged;
            vc.mean_reduction = cell.mean_reduction;
            vc.ci_low = cell.ci_low;
            vc.ci_high = cell.ci_high;
            vc.reductions = cell.reductions;
            report.cells.push_back(std::move(vc));
        }
    }
    for (std::size_t t = 0; t < spec.taus.size(); ++t) {
        for (std::size_t v = 0; v < variants.size(); ++v) {
            by_tau[t].push_back(&report.cells[v * spec.taus.size() + t]);
        }
    }

    if (variants.size() >= 2) {
        for (std::size_t t = 0; t < spec.taus.size(); ++t) {
            std::vector<std::vector<double>> groups;
            for (const auto* cell : by_tau[t]) groups.push_back(cell->reductions);
            for (const auto& pw : mann_whitney_bonferroni(groups, spec.alpha)) {
                BatteryPair pair;
                pair.tau = spec.taus[t];
                pair.variant_a = by_tau[t][pw.group_a]->variant;
                pair.variant_b = by_tau[t][pw.group_b]->variant;
                pair.u = pw.u;
                pair.p_raw = pw.p_raw;
                pair.p_adjusted = pw.p_adjusted;
                pair.significant = pw.significant;
                report.pairwise.push_back(std::move(pair));
            }
        }
    }

    if (spec.kind == BatteryKind::PValues && !report.cells.empty()) {
        // Treated vs baseline prevalence at the first tau, one point per run.
        // Treated values are recovered from the stored reductions, which were
        // computed against the variant's measured baseline mean.
        std::vector<double> xs, ys;
        for (std::size_t v = 0; v < variants.size(); ++v) {
            const auto& cell = report.cells[v * spec.taus.size()];
            const double base_mean = variant_baseline_mean[v];
            for (double red : cell.reductions) {
                const double treated = base_mean * (1.0 - red);
                if (base_mean > 0.0 && treated > 0.0) {
                    xs.push_back(base_mean);
                    ys.push_back(treated);
                }
            }
        }
        if (xs.size() >= 3) {
            auto [slope, se] = loglog_slope(xs, ys);
            report.scaling_slope = slope;
            report.scaling_stderr = se;
        }
    }
    return report;
}

inline void save_battery_report(const BatteryReport& report, std::ostream& out) {
    char buf[256];
    out << "# kind=" << to_string(report.kind) << "\n";
    if (!std::isnan(report.scaling_slope)) {
        std::snprintf(buf, sizeof(buf), "# scaling_slope=%.17g scaling_stderr=%.17g\n",
                      report.scaling_slope, report.scaling_stderr);
        out << buf;
    }
    out << "variant\ttau\tn_runs\tn_nonconverged\tmean_reduction\tci_low\tci_high\n";
    for (const auto& c : report.cells) {
        std::snprintf(buf, sizeof(buf), "\t%.17g\t%zu\t%zu\t%.17g\t%.17g\t%.17g\n", c.tau,
                      c.n_runs, c.n_nonconverged, c.mean_reduction, c.ci_low, c.ci_high);
        out << c.variant << buf;
    }
    out << "pairwise\ttau\tvariant_a\tvariant_b\tu\tp_raw\tp_bonferroni\tsignificant\n";
    for (const auto& p : report.pairwise) {
        std::snprintf(buf, sizeof(buf), "pair\t%.17g\t", p.tau);
        out << buf << p.variant_a << "\t" << p.variant_b << "\t";
        std::snprintf(buf, sizeof(buf), "%.17g\t%.17g\t%.17g\t%d\n", p.u, p.p_raw, p.p_adjusted,
                      p.significant ? 1 : 0);
        out << buf;
    }
}

inline void save_battery_report(const BatteryReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write battery report: " + path);
    save_battery_report(report, out);
}

}  // namespace tdsim::exp
