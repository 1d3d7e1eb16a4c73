// tdsim: calibrate takedown delays from moderation records, generate follower
// networks, and simulate how removal delay changes the prevalence, reach, and
// impressions of illegal content.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tdsim/calib/delay.hpp"
#include "tdsim/calib/fit.hpp"
#include "tdsim/calib/records.hpp"
#include "tdsim/config.hpp"
#include "tdsim/error.hpp"
#include "tdsim/exp/robustness.hpp"
#include "tdsim/exp/sweep.hpp"
#include "tdsim/net/edgelist.hpp"
#include "tdsim/sim/engine.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitData = 2;
constexpr int kExitNotConverged = 3;

tdsim::AppConfig load_app_config(const std::string& config_path) {
    std::string path = config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("TDSIM_CONFIG")) path = env;
    }
    if (path.empty()) {
        std::istringstream empty;
        return tdsim::load_config(empty, "<defaults>");
    }
    return tdsim::load_config_file(path);
}

struct FitArgs {
    std::string records_file;
    std::string platform;
    std::string method = "logccdf-ls";
    std::string out;
    std::string ccdf_dir;
    bool by_category = false;
    bool all_grounds = false;
    std::size_t min_n = 30;
    double t_min = std::numeric_limits<double>::quiet_NaN();
    double t_max = std::numeric_limits<double>::quiet_NaN();
};

int cmd_fit(const FitArgs& args) {
    using namespace tdsim::calib;
    IngestReport report;
    auto records = ingest_records(args.records_file, args.platform, !args.all_grounds, &report);
    std::fprintf(stderr,
                 "rows=%zu kept=%zu excluded: platform=%zu ground=%zu sentinel_date=%zu "
                 "negative_delay=%zu bad_date=%zu\n",
                 report.rows_total, report.kept, report.excluded_platform,
                 report.excluded_ground, report.excluded_sentinel_date,
                 report.excluded_negative_delay, report.excluded_bad_date);
    if (records.empty()) throw tdsim::DataError("no records left after filtering");

    FitOptions opt;
    opt.min_samples = args.min_n;
    opt.t_min = args.t_min;
    opt.t_max = args.t_max;
    if (args.method == "mle") opt.method = FitMethod::Mle;
    else if (args.method != "logccdf-ls") {
        throw tdsim::ParamError("unknown fit method '" + args.method + "'");
    }

    std::vector<CategoryFit> rows;
    if (args.by_category) {
        rows = fit_tau_by_category(records, opt);
    } else {
        std::map<std::string, std::vector<ModerationRecord>> by_platform;
        for (auto& r : records) by_platform[r.platform].push_back(r);
        for (auto& [platform, recs] : by_platform) {
            CategoryFit row;
            row.platform = platform;
            row.n = recs.size();
            if (recs.size() >= opt.min_samples) {
                auto dist = delays_and_ccdf(recs, platform);
                try {
                    FitOptions ls = opt;
                    ls.method = FitMethod::LogCcdfLeastSquares;
                    row.logccdf_ls = fit_tau(dist, ls);
                    FitOptions mle = opt;
                    mle.method = FitMethod::Mle;
                    row.mle = fit_tau(dist, mle);
                    row.fitted = true;
                } catch (const tdsim::DataError&) {
                    row.fitted = false;
                }
                if (!args.ccdf_dir.empty()) {
                    save_ccdf(dist, args.ccdf_dir + "/ccdf_" + platform + ".tsv");
                }
            }
            rows.push_back(std::move(row));
        }
    }
    if (args.out.empty()) {
        save_fit_report(rows, std::cout);
    } else {
        save_fit_report(rows, args.out);
    }
    return kExitOk;
}

struct NetgenArgs {
    std::string mode = "rwg";
    std::string in;
    std::string out;
    std::uint32_t n = 1000;
    std::uint32_t n_init = 21;
    std::uint32_t k_out = 20;
    double p_friend = 0.5;
    std::uint32_t k = 2;
    std::string degree = "total";
    std::size_t target_edges = 0;
    std::uint64_t seed = 1;
};

int cmd_netgen(const NetgenArgs& args) {
    using namespace tdsim;
    RandomStream rng(args.seed);
    FollowerNetwork result;
    if (args.mode == "rwg") {
        result = net::random_walk_growth(args.n, args.n_init, args.k_out, args.p_friend, rng);
    } else if (args.mode == "kcore") {
        net::DegreeMode deg = net::DegreeMode::Total;
        if (args.degree == "in") deg = net::DegreeMode::In;
        else if (args.degree == "out") deg = net::DegreeMode::Out;
        else if (args.degree != "total") throw ParamError("unknown degree mode " + args.degree);
        result = net::k_core(net::load_edge_list(args.in), args.k, deg);
    } else if (args.mode == "thin") {
        result = net::thin_to_density(net::load_edge_list(args.in), args.target_edges, rng);
    } else {
        throw ParamError("unknown netgen mode '" + args.mode + "'");
    }
    net::save_edge_list(result, args.out);
    std::printf("N=%u E=%zu\n", result.n_nodes, result.n_edges());
    return kExitOk;
}

struct SimulateArgs {
    std::string config;
    double tau = -1.0;  // <0 = take from config
    std::int64_t seed = -1;
    std::string trace;
};

int cmd_simulate(const SimulateArgs& args) {
    using namespace tdsim;
    AppConfig cfg = load_app_config(args.config);
    if (args.tau >= 0.0) cfg.sim.tau = args.tau;
    if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);

    RandomStream net_rng(splitmix64(cfg.seed ^ 0x6e6574ULL));
    const auto network = build_network(cfg.network, net_rng);

    auto run_one = [&](double tau) {
        SimConfig sim = cfg.sim;
        sim.tau = tau;
        sim.seed = cfg.seed;
        RandomStream probs_rng(splitmix64(cfg.seed ^ 0x70726f6273ULL));
        const auto probs = calib::sample_illegal_probs(cfg.p_spec, network.n_nodes, probs_rng);
        return sim::run_until_converged(sim, network, probs);
    };

    const auto result = run_one(cfg.sim.tau);
    std::printf("network: N=%u E=%zu\n", network.n_nodes, network.n_edges());
    std::printf("mode: %s\n", cfg.sim.tau > 0.0 ? "removal" : "baseline");
    if (cfg.sim.tau > 0.0) std::printf("tau_days=%.17g\n", cfg.sim.tau);
    std::printf("seed=%llu\n", static_cast<unsigned long long>(cfg.seed));
    std::printf("steps=%d converged=%s\n", result.steps, result.converged ? "true" : "false");
    std::printf("prevalence_ema=%.17g\n", result.final_ema);
    std::printf("impressions=%llu reach=%llu\n",
                static_cast<unsigned long long>(result.impressions),
                static_cast<unsigned long long>(result.reach));
    std::printf("messages: legal=%llu illegal=%llu removed=%zu\n",
                static_cast<unsigned long long>(result.legal_created),
                static_cast<unsigned long long>(result.illegal_created),
                result.removed_lifetimes.size());

    if (cfg.sim.tau > 0.0) {
        // Paired baseline (same seed, removal off) for a quick effect readout.
        const auto baseline = run_one(0.0);
        if (baseline.final_ema > 0.0) {
            std::printf("reduction_vs_paired_baseline: prevalence=%.6f",
                        sim::reduction(baseline.final_ema, result.final_ema));
            if (baseline.impressions > 0) {
                std::printf(" impressions=%.6f",
                            sim::reduction(static_cast<double>(baseline.impressions),
                                           static_cast<double>(result.impressions)));
            }
            if (baseline.reach > 0) {
                std::printf(" reach=%.6f",
                            sim::reduction(static_cast<double>(baseline.reach),
                                           static_cast<double>(result.reach)));
            }
            std::printf("\n");
        }
    }
    if (!args.trace.empty()) sim::save_trace(result, args.trace);
    return result.converged ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const std::string& config_path, const std::string& out) {
    using namespace tdsim;
    AppConfig cfg = load_app_config(config_path);
    RandomStream net_rng(splitmix64(cfg.seed ^ 0x6e6574ULL));
    const auto network = build_network(cfg.network, net_rng);

    exp::SweepSpec spec;
    spec.tau_grid = cfg.tau_grid;
    spec.runs_per_cell = cfg.runs;
    spec.base = cfg.sim;
    spec.p_spec = cfg.p_spec;
    spec.base_seed = cfg.seed;
    spec.workers = cfg.workers;
    spec.bootstrap_resamples = cfg.bootstrap_resamples;
    spec.paired_bootstrap = cfg.paired_bootstrap;
    spec.fixed_horizon = cfg.fixed_horizon;

    const auto result = exp::run_sweep(spec, network);
    if (out.empty()) {
        exp::save_sweep_result(result, std::cout);
    } else {
        exp::save_sweep_result(result, out);
        std::printf("wrote %s (%zu cells)\n", out.c_str(), result.cells.size());
    }
    return kExitOk;
}

int cmd_robustness(const std::string& config_path, const std::string& kind,
                   std::size_t runs_override, const std::string& out) {
    using namespace tdsim;
    AppConfig cfg = load_app_config(config_path);
    RandomStream net_rng(splitmix64(cfg.seed ^ 0x6e6574ULL));
    const auto network = build_network(cfg.network, net_rng);

    exp::BatterySpec spec;
    if (kind == "p-distributions") spec.kind = exp::BatteryKind::PDistributions;
    else if (kind == "s_H") spec.kind = exp::BatteryKind::HighRiskShare;
    else if (kind == "p-values") spec.kind = exp::BatteryKind::PValues;
    else if (kind == "network") spec.kind = exp::BatteryKind::NetworkStructure;
    else throw ParamError("unknown robustness kind '" + kind + "'");
    spec.base = cfg.sim;
    spec.base_p = cfg.p_spec;
    spec.base_seed = cfg.seed;
    spec.workers = cfg.workers;
    spec.runs_per_variant = runs_override > 0 ? runs_override : cfg.runs;

    const auto report = exp::robustness_battery(spec, network);
    if (out.empty()) {
        exp::save_battery_report(report, std::cout);
    } else {
        exp::save_battery_report(report, out);
        std::printf("wrote %s\n", out.c_str());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Illegal-content takedown delay simulator and calibration toolkit"};
    app.require_subcommand(1);

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand(
        "fit", "Fit expected takedown delay tau from a moderation records file");
    fit_cmd->add_option("records", fit.records_file, "Delimited records file")->required();
    fit_cmd->add_option("--platform", fit.platform, "Keep only this platform");
    fit_cmd->add_flag("--by-category", fit.by_category, "One fit per (platform, category)");
    fit_cmd->add_option("--method", fit.method, "Fit method: logccdf-ls or mle")
        ->capture_default_str();
    fit_cmd->add_flag("--all-grounds", fit.all_grounds,
                      "Keep all decision grounds, not only illegal-content decisions");
    fit_cmd->add_option("--min-n", fit.min_n, "Minimum samples per fit")->capture_default_str();
    fit_cmd->add_option("--t-min", fit.t_min, "Fit window lower bound in days (default 0)");
    fit_cmd->add_option("--t-max", fit.t_max,
                        "Fit window upper bound in days (default 95th percentile)");
    fit_cmd->add_option("--out", fit.out, "Write report here instead of stdout");
    fit_cmd->add_option("--ccdf-dir", fit.ccdf_dir, "Also write per-group CCDF point files");

    NetgenArgs netgen;
    auto* net_cmd = app.add_subcommand("netgen", "Generate or reduce a follower network");
    net_cmd->add_option("--mode", netgen.mode, "rwg, kcore, or thin")->capture_default_str();
    net_cmd->add_option("--out", netgen.out, "Output edge list")->required();
    net_cmd->add_option("--in", netgen.in, "Input edge list (kcore/thin modes)");
    net_cmd->add_option("--n", netgen.n, "Final node count (rwg)")->capture_default_str();
    net_cmd->add_option("--n-init", netgen.n_init, "Fully connected seed size (rwg)")
        ->capture_default_str();
    net_cmd->add_option("--k-out", netgen.k_out, "Out-degree of new nodes (rwg)")
        ->capture_default_str();
    net_cmd->add_option("--p-friend", netgen.p_friend,
                        "Probability of following a friend of the anchor (rwg)")
        ->capture_default_str();
    net_cmd->add_option("--k", netgen.k, "Core order (kcore)")->capture_default_str();
    net_cmd->add_option("--degree", netgen.degree, "Degree used for peeling: total, in, out")
        ->capture_default_str();
    net_cmd->add_option("--target-edges", netgen.target_edges, "Edges to keep (thin/kcore)")
        ->capture_default_str();
    net_cmd->add_option("--seed", netgen.seed, "Random seed")->capture_default_str();

    SimulateArgs simulate;
    auto* sim_cmd = app.add_subcommand("simulate", "Run one simulation to convergence");
    sim_cmd->add_option("--config", simulate.config,
                        "Config file (default: $TDSIM_CONFIG, else desk preset)");
    sim_cmd->add_option("--tau", simulate.tau,
                        "Expected takedown delay in days; omit for baseline");
    sim_cmd->add_option("--seed", simulate.seed, "Override [experiment] seed");
    sim_cmd->add_option("--trace", simulate.trace, "Write per-step trace here");

    std::string sweep_config, sweep_out;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run the tau sweep with bootstrap CIs");
    sweep_cmd->add_option("--config", sweep_config,
                          "Config file (default: $TDSIM_CONFIG, else desk preset)");
    sweep_cmd->add_option("--out", sweep_out, "Write result table here instead of stdout");

    std::string rob_config, rob_kind, rob_out;
    std::size_t rob_runs = 0;
    auto* rob_cmd = app.add_subcommand("robustness", "Run a robustness battery");
    rob_cmd->add_option("--config", rob_config,
                        "Config file (default: $TDSIM_CONFIG, else desk preset)");
    rob_cmd->add_option("--kind", rob_kind, "p-distributions, s_H, p-values, or network")
        ->required();
    rob_cmd->add_option("--runs", rob_runs, "Runs per variant (default: [experiment] runs)");
    rob_cmd->add_option("--out", rob_out, "Write report here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit_cmd->parsed()) return cmd_fit(fit);
        if (net_cmd->parsed()) return cmd_netgen(netgen);
        if (sim_cmd->parsed()) return cmd_simulate(simulate);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_config, sweep_out);
        if (rob_cmd->parsed()) return cmd_robustness(rob_config, rob_kind, rob_runs, rob_out);
    } catch (const tdsim::ParamError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return kExitData;
    } catch (const tdsim::DataError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return kExitData;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "internal error: %s\n", err.what());
        return kExitInternal;
    }
    return kExitInternal;
}
