#pragma once

#include <atomic>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tdsim/calib/illegal_prob.hpp"
#include "tdsim/error.hpp"
#include "tdsim/exp/stats.hpp"
#include "tdsim/network.hpp"
#include "tdsim/rng.hpp"
#include "tdsim/sim/engine.hpp"
#include "tdsim/sim/metrics.hpp"

namespace tdsim::exp {

/// A sweep runs one shared battery of baseline (no removal) simulations plus
/// one battery per tau value, and reports reductions relative to the baseline
/// mean. Baselines are tau-independent, so sharing them across cells halves
/// the compute.
struct SweepSpec {
    std::vector<double> tau_grid;
    std::size_t runs_per_cell = 20;
    SimConfig base;  // per-run seed and tau are filled in by the sweep
    calib::IllegalProbSpec p_spec;
    std::uint64_t base_seed = 1;
    std::size_t workers = 0;  // 0 = hardware concurrency
    std::size_t bootstrap_resamples = 10000;
    bool paired_bootstrap = false;
    // Truncate all runs of a cell (and the baselines) at the cell's shortest
    // run before comparing, instead of comparing each run at its own end.
    bool fixed_horizon = false;

    void validate() const {
        if (tau_grid.empty()) throw ParamError("sweep: empty tau grid");
        for (double t : tau_grid) {
            if (!(t > 0.0)) throw ParamError("sweep: tau values must be > 0");
        }
        if (runs_per_cell < 2) throw ParamError("sweep: runs_per_cell must be >= 2");
    }
};

/// Deterministic per-run seed: cell 0 is the baseline battery, treatment
/// cells are 1-based in tau_grid order. Any single run can be reproduced from
/// (base_seed, cell, run).
inline std::uint64_t run_seed(std::uint64_t base_seed, std::size_t cell, std::size_t run) {
    return base_seed ^ splitmix64((static_cast<std::uint64_t>(cell) << 32) |
                                  static_cast<std::uint64_t>(run));
}

enum class Metric { Prevalence, Impressions, Reach };

inline const char* to_string(Metric m) {
    switch (m) {
        case Metric::Prevalence: return "prevalence";
        case Metric::Impressions: return "impressions";
        case Metric::Reach: return "reach";
    }
    return "?";
}

struct CellStats {
    double tau = 0.0;
    Metric metric = Metric::Prevalence;
    double mean_reduction = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n_runs = 0;
    std::size_t n_nonconverged = 0;
    std::vector<double> reductions;  // per treatment run, in run order; not serialized
};

struct SweepResult {
    std::vector<double> tau_grid;
    std::vector<CellStats> cells;  // 3 metrics per tau, grid order
    std::size_t baseline_runs = 0;
    std::size_t baseline_nonconverged = 0;
    double baseline_prevalence_mean = 0.0;
    std::uint64_t base_seed = 0;

    const CellStats& cell(std::size_t tau_index, Metric m) const {
        return cells[tau_index * 3 + static_cast<std::size_t>(m)];
    }
};

namespace detail {

// Runs jobs 0..n_jobs-1 over a small pool; results land in slot order so the
// output is independent of scheduling.
template <typename Fn>
inline void parallel_for_jobs(std::size_t n_jobs, std::size_t workers, Fn&& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n_jobs);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n_jobs; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n_jobs) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

inline sim::RunResult execute_run(const SweepSpec& spec, const FollowerNetwork& net,
                                  double tau, std::uint64_t seed) {
    SimConfig cfg = spec.base;
    cfg.tau = tau;
    cfg.seed = seed;
    RandomStream probs_rng(splitmix64(seed ^ 0x70726f6273ULL));
    const auto probs = calib::sample_illegal_probs(spec.p_spec, net.n_nodes, probs_rng);
    return sim::run_until_converged(cfg, net, probs);
}

// EMA of a prevalence trace truncated to `steps` observations.
inline double ema_at(const std::vector<double>& trace, std::size_t steps, double rho) {
    double ema = 0.0;
    for (std::size_t i = 0; i < steps && i < trace.size(); ++i) {
        ema = i == 0 ? trace[i] : rho * ema + (1.0 - rho) * trace[i];
    }
    return ema;
}

inline double metric_at_end(const sim::RunResult& run, Metric m) {
    switch (m) {
        case Metric::Prevalence: return run.final_ema;
        case Metric::Impressions: return static_cast<double>(run.impressions);
        case Metric::Reach: return static_cast<double>(run.reach);
    }
    return 0.0;
}

inline double metric_at_step(const sim::RunResult& run, Metric m, std::size_t steps,
                             double rho) {
    const std::size_t idx = std::min(steps, run.prevalence_trace.size()) - 1;
    switch (m) {
        case Metric::Prevalence: return ema_at(run.prevalence_trace, idx + 1, rho);
        case Metric::Impressions: return static_cast<double>(run.impressions_trace[idx]);
        case Metric::Reach: return static_cast<double>(run.reach_trace[idx]);
    }
    return 0.0;
}

}  // namespace detail

inline SweepResult run_sweep(const SweepSpec& spec, const FollowerNetwork& network) {
    spec.validate();
    calib::check_target_mean(spec.p_spec, spec.p_spec.analytic_mean());

    const std::size_t runs = spec.runs_per_cell;
    const std::size_t n_cells = spec.tau_grid.size();
    const std::size_t n_jobs = runs * (n_cells + 1);
    std::vector<sim::RunResult> results(n_jobs);

    detail::parallel_for_jobs(n_jobs, spec.workers, [&](std::size_t job) {
        const std::size_t cell = job / runs;  // 0 = baseline
        const std::size_t k = job % runs;
        const double tau = cell == 0 ? 0.0 : spec.tau_grid[cell - 1];
        results[job] = detail::execute_run(spec, network, tau,
                                           run_seed(spec.base_seed, cell, k));
    });

    auto baseline = std::span<const sim::RunResult>(results.data(), runs);

    SweepResult out;
    out.tau_grid = spec.tau_grid;
    out.base_seed = spec.base_seed;
    out.baseline_runs = runs;
    for (const auto& b : baseline) {
        if (!b.converged) ++out.baseline_nonconverged;
    }

    const Metric metrics[3] = {Metric::Prevalence, Metric::Impressions, Metric::Reach};
    for (std::size_t c = 0; c < n_cells; ++c) {
        auto treat = std::span<const sim::RunResult>(results.data() + (c + 1) * runs, runs);
        std::size_t horizon = SIZE_MAX;
        if (spec.fixed_horizon) {
            for (const auto& r : treat) horizon = std::min(horizon, r.prevalence_trace.size());
            for (const auto& r : baseline) horizon = std::min(horizon, r.prevalence_trace.size());
        }
        for (Metric m : metrics) {
            auto value_of = [&](const sim::RunResult& r) {
                return spec.fixed_horizon
                           ? detail::metric_at_step(r, m, horizon, spec.base.rho)
                           : detail::metric_at_end(r, m);
            };
            std::vector<double> base_vals;
            for (const auto& r : baseline) base_vals.push_back(value_of(r));
            const double base_mean =
                std::accumulate(base_vals.begin(), base_vals.end(), 0.0) /
                static_cast<double>(base_vals.size());

            std::vector<double> reductions;
            for (const auto& r : treat) {
                reductions.push_back(sim::reduction(base_mean, value_of(r)));
            }
            CellStats cs;
            cs.tau = spec.tau_grid[c];
            cs.metric = m;
            cs.n_runs = runs;
            for (const auto& r : treat) {
                if (!r.converged) ++cs.n_nonconverged;
            }
            cs.mean_reduction = std::accumulate(reductions.begin(), reductions.end(), 0.0) /
                                static_cast<double>(reductions.size());

            RandomStream boot_rng(splitmix64(
                spec.base_seed ^ splitmix64(0xb007'0000ULL + c * 8 + static_cast<std::size_t>(m))));
            if (spec.paired_bootstrap) {
                std::vector<double> means(spec.bootstrap_resamples);
                for (auto& mv : means) {
                    double bsum = 0.0;
                    for (std::size_t i = 0; i < base_vals.size(); ++i) {
                        bsum += base_vals[boot_rng.uniform_int(base_vals.size())];
                    }
                    const double bmean = bsum / static_cast<double>(base_vals.size());
                    double rsum = 0.0;
                    for (std::size_t i = 0; i < reductions.size(); ++i) {
                        const auto& r = treat[boot_rng.uniform_int(treat.size())];
                        rsum += sim::reduction(bmean, value_of(r));
                    }
                    mv = rsum / static_cast<double>(reductions.size());
                }
                std::sort(means.begin(), means.end());
                cs.ci_low = means[static_cast<std::size_t>(0.025 * (means.size() - 1))];
                cs.ci_high = means[static_cast<std::size_t>(0.975 * (means.size() - 1))];
            } else {
                auto [lo, hi] = bootstrap_ci(reductions, boot_rng, spec.bootstrap_resamples);
                cs.ci_low = lo;
                cs.ci_high = hi;
            }
            cs.reductions = std::move(reductions);
            out.cells.push_back(cs);
        }
    }
    double bsum = 0.0;
    for (const auto& b : baseline) bsum += b.final_ema;
    out.baseline_prevalence_mean = bsum / static_cast<double>(runs);
    return out;
}

inline void save_sweep_result(const SweepResult& result, std::ostream& out) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "# base_seed=%llu baseline_runs=%zu baseline_shared_across_cells=true "
                  "baseline_prevalence_mean=%.17g baseline_nonconverged=%zu\n",
                  static_cast<unsigned long long>(result.base_seed), result.baseline_runs,
                  result.baseline_prevalence_mean, result.baseline_nonconverged);
    out << buf;
    out << "tau_days\tmetric\tmean_reduction\tci_low\tci_high\tn_runs\tn_nonconverged\n";
    for (const auto& c : result.cells) {
        std::snprintf(buf, sizeof(buf), "%.17g\t%s\t%.17g\t%.17g\t%.17g\t%zu\t%zu\n", c.tau,
                      to_string(c.metric), c.mean_reduction, c.ci_low, c.ci_high, c.n_runs,
                      c.n_nonconverged);
        out << buf;
    }
}

inline void save_sweep_result(const SweepResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write sweep result: " + path);
    save_sweep_result(result, out);
}

/// Re-read a sweep result file written by save_sweep_result.
inline SweepResult load_sweep_result(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open sweep result: " + path);
    SweepResult result;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line);
            std::string tok;
            while (meta >> tok) {
                if (tok.rfind("base_seed=", 0) == 0) result.base_seed = std::stoull(tok.substr(10));
                if (tok.rfind("baseline_runs=", 0) == 0) {
                    result.baseline_runs = std::stoull(tok.substr(14));
                }
                if (tok.rfind("baseline_prevalence_mean=", 0) == 0) {
                    result.baseline_prevalence_mean = std::stod(tok.substr(25));
                }
                if (tok.rfind("baseline_nonconverged=", 0) == 0) {
                    result.baseline_nonconverged = std::stoull(tok.substr(22));
                }
            }
            continue;
        }
        if (line.rfind("tau_days", 0) == 0) continue;  // header
        std::istringstream row(line);
        CellStats c;
        std::string metric;
        if (!(row >> c.tau >> metric >> c.mean_reduction >> c.ci_low >> c.ci_high >> c.n_runs >>
              c.n_nonconverged)) {
            throw DataError(path + ":" + std::to_string(lineno) + ": bad sweep row");
        }
        if (metric == "prevalence") c.metric = Metric::Prevalence;
        else if (metric == "impressions") c.metric = Metric::Impressions;
        else if (metric == "reach") c.metric = Metric::Reach;
        else throw DataError(path + ":" + std::to_string(lineno) + ": unknown metric " + metric);
        result.cells.push_back(c);
        if (result.tau_grid.empty() || result.tau_grid.back() != c.tau) {
            result.tau_grid.push_back(c.tau);
        }
    }
    return result;
}

}  // namespace tdsim::exp
