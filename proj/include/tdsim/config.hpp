#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tdsim/calib/illegal_prob.hpp"
#include "tdsim/error.hpp"
#include "tdsim/net/edgelist.hpp"
#include "tdsim/net/growth.hpp"
#include "tdsim/net/reduce.hpp"
#include "tdsim/network.hpp"
#include "tdsim/rng.hpp"
#include "tdsim/types.hpp"

namespace tdsim {

/// Network construction recipe.
struct NetSpec {
    enum class Mode { SyntheticRwg, EmpiricalKcore, EmpiricalThin };
    Mode mode = Mode::SyntheticRwg;
    std::string path;  // edge list for the empirical modes
    std::uint32_t n = 1000;
    std::uint32_t n_init = 21;
    std::uint32_t k_out = 20;
    double p_friend = 0.5;
    std::uint32_t k = 2;              // core order
    std::size_t target_edges = 0;     // 0 = no thinning
    net::DegreeMode degree = net::DegreeMode::Total;
};

inline FollowerNetwork build_network(const NetSpec& spec, RandomStream& rng) {
    switch (spec.mode) {
        case NetSpec::Mode::SyntheticRwg:
            return net::random_walk_growth(spec.n, spec.n_init, spec.k_out, spec.p_friend, rng);
        case NetSpec::Mode::EmpiricalKcore: {
            auto netw = net::k_core(net::load_edge_list(spec.path), spec.k, spec.degree);
            if (spec.target_edges > 0 && spec.target_edges < netw.n_edges()) {
                netw = net::thin_to_density(netw, spec.target_edges, rng);
            }
            return netw;
        }
        case NetSpec::Mode::EmpiricalThin: {
            auto netw = net::load_edge_list(spec.path);
            return net::thin_to_density(netw, spec.target_edges, rng);
        }
    }
    throw ParamError("build_network: unknown mode");
}

/// Everything a CLI invocation needs: network recipe, content model,
/// engine/convergence parameters, and experiment settings.
struct AppConfig {
    NetSpec network;
    calib::IllegalProbSpec p_spec;
    double target_p = 0.01;
    SimConfig sim;
    std::vector<double> tau_grid;
    std::size_t runs = 20;
    std::size_t workers = 0;
    std::uint64_t seed = 1;
    std::size_t bootstrap_resamples = 10000;
    bool paired_bootstrap = false;
    bool fixed_horizon = false;
};

/// Log-spaced grid from two hours to 739 days, with the per-platform fitted
/// delays merged in as markers.
inline std::vector<double> default_tau_grid() {
    std::vector<double> grid;
    const double lo = std::log(2.0 / 24.0), hi = std::log(739.0);
    for (int i = 0; i < 12; ++i) {
        grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) / 11.0));
    }
    for (double marker : {6.0, 31.0, 87.0, 136.0, 286.0}) grid.push_back(marker);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

inline void apply_network_preset(NetSpec& n, const std::string& preset, int line) {
    if (preset == "desk") {
        n = NetSpec{};  // synthetic rwg, N=1000, k_out=20
    } else if (preset == "paper") {
        n = NetSpec{};
        n.n = 10006;
        n.n_init = 181;
        n.k_out = 180;
    } else if (preset == "paper-wide") {
        n = NetSpec{};
        n.n = 58296;
        n.n_init = 19;
        n.k_out = 18;
    } else {
        throw ParamError("line " + std::to_string(line) + ": unknown network preset '" +
                         preset + "'");
    }
}

namespace detail {

struct ConfigEntry {
    std::string value;
    int line = 0;
    bool consumed = false;
};

struct RawConfig {
    // section -> key -> entry; duplicate keys keep the last occurrence.
    std::map<std::string, std::map<std::string, ConfigEntry>> sections;
};

inline std::string trim_copy(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline RawConfig parse_raw_config(std::istream& in, const std::string& origin) {
    RawConfig raw;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim_copy(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') {
                throw ParamError(origin + ":" + std::to_string(lineno) + ": unterminated section");
            }
            section = trim_copy(s.substr(1, s.size() - 2));
            raw.sections[section];
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) {
            throw ParamError(origin + ":" + std::to_string(lineno) + ": expected key=value");
        }
        if (section.empty()) {
            throw ParamError(origin + ":" + std::to_string(lineno) + ": key outside any section");
        }
        raw.sections[section][trim_copy(s.substr(0, eq))] =
            ConfigEntry{trim_copy(s.substr(eq + 1)), lineno, false};
    }
    return raw;
}

class ConfigReader {
public:
    ConfigReader(RawConfig& raw, std::string origin) : raw_(raw), origin_(std::move(origin)) {}

    std::optional<std::string> get(const std::string& section, const std::string& key) {
        auto sec = raw_.sections.find(section);
        if (sec == raw_.sections.end()) return std::nullopt;
        auto it = sec->second.find(key);
        if (it == sec->second.end()) return std::nullopt;
        it->second.consumed = true;
        last_line_ = it->second.line;
        return it->second.value;
    }

    double get_double(const std::string& section, const std::string& key, double fallback) {
        auto v = get(section, key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            const double d = std::stod(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("trailing");
            return d;
        } catch (const std::exception&) {
            throw ParamError(where() + ": bad number '" + *v + "' for " + key);
        }
    }

    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) {
        auto v = get(section, key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            const std::uint64_t u = std::stoull(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("trailing");
            return u;
        } catch (const std::exception&) {
            throw ParamError(where() + ": bad integer '" + *v + "' for " + key);
        }
    }

    bool get_bool(const std::string& section, const std::string& key, bool fallback) {
        auto v = get(section, key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw ParamError(where() + ": bad boolean '" + *v + "' for " + key);
    }

    std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                        std::vector<double> fallback) {
        auto v = get(section, key);
        if (!v) return fallback;
        std::vector<double> out;
        std::stringstream ss(*v);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                out.push_back(std::stod(trim_copy(tok)));
            } catch (const std::exception&) {
                throw ParamError(where() + ": bad number '" + tok + "' in " + key);
            }
        }
        if (out.empty()) throw ParamError(where() + ": empty list for " + key);
        return out;
    }

    void reject_unknown() const {
        for (const auto& [section, entries] : raw_.sections) {
            static const char* known[] = {"network", "content", "engine",
                                          "removal", "convergence", "experiment"};
            if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
                    return section == k;
                }) == std::end(known)) {
                throw ParamError(origin_ + ": unknown section [" + section + "]");
            }
            for (const auto& [key, entry] : entries) {
                if (!entry.consumed) {
                    throw ParamError(origin_ + ":" + std::to_string(entry.line) +
                                     ": unknown key '" + key + "' in [" + section + "]");
                }
            }
        }
    }

    std::string where() const { return origin_ + ":" + std::to_string(last_line_); }

private:
    RawConfig& raw_;
    std::string origin_;
    int last_line_ = 0;
};

}  // namespace detail

/// Parse a sectioned key=value config. Every key is optional; an empty file
/// yields the desk preset. Unknown sections or keys are rejected with their
/// location.
inline AppConfig load_config(std::istream& in, const std::string& origin = "<config>") {
    auto raw = detail::parse_raw_config(in, origin);
    detail::ConfigReader r(raw, origin);
    AppConfig cfg;

    if (auto preset = r.get("network", "preset")) {
        apply_network_preset(cfg.network, *preset, 0);
    }
    if (auto mode = r.get("network", "mode")) {
        if (*mode == "synthetic-rwg") cfg.network.mode = NetSpec::Mode::SyntheticRwg;
        else if (*mode == "empirical-kcore") cfg.network.mode = NetSpec::Mode::EmpiricalKcore;
        else if (*mode == "empirical-thin") cfg.network.mode = NetSpec::Mode::EmpiricalThin;
        else throw ParamError(r.where() + ": unknown network mode '" + *mode + "'");
    }
    if (auto path = r.get("network", "path")) cfg.network.path = *path;
    cfg.network.n = static_cast<std::uint32_t>(r.get_u64("network", "n", cfg.network.n));
    cfg.network.n_init =
        static_cast<std::uint32_t>(r.get_u64("network", "n_init", cfg.network.n_init));
    cfg.network.k_out =
        static_cast<std::uint32_t>(r.get_u64("network", "k_out", cfg.network.k_out));
    cfg.network.p_friend = r.get_double("network", "p_friend", cfg.network.p_friend);
    cfg.network.k = static_cast<std::uint32_t>(r.get_u64("network", "k", cfg.network.k));
    cfg.network.target_edges = r.get_u64("network", "target_edges", cfg.network.target_edges);
    if (auto deg = r.get("network", "degree")) {
        if (*deg == "total") cfg.network.degree = net::DegreeMode::Total;
        else if (*deg == "in") cfg.network.degree = net::DegreeMode::In;
        else if (*deg == "out") cfg.network.degree = net::DegreeMode::Out;
        else throw ParamError(r.where() + ": unknown degree mode '" + *deg + "'");
    }

    if (auto kind = r.get("content", "kind")) {
        if (*kind == "normal") cfg.p_spec.kind = calib::ProbKind::Normal;
        else if (*kind == "beta") cfg.p_spec.kind = calib::ProbKind::Beta;
        else if (*kind == "two-group") cfg.p_spec.kind = calib::ProbKind::TwoGroup;
        else throw ParamError(r.where() + ": unknown content kind '" + *kind + "'");
    }
    const bool target_p_given = raw.sections.count("content") &&
                                raw.sections["content"].count("p");
    cfg.target_p = r.get_double("content", "p", cfg.target_p);
    cfg.p_spec.mu = r.get_double("content", "mu", cfg.p_spec.mu);
    cfg.p_spec.sigma = r.get_double("content", "sigma", cfg.p_spec.sigma);
    cfg.p_spec.alpha = r.get_double("content", "alpha", cfg.p_spec.alpha);
    cfg.p_spec.beta = r.get_double("content", "beta", cfg.p_spec.beta);
    cfg.p_spec.s_h = r.get_double("content", "s_h", cfg.p_spec.s_h);
    cfg.p_spec.alpha_h = r.get_double("content", "alpha_h", cfg.p_spec.alpha_h);
    cfg.p_spec.beta_h = r.get_double("content", "beta_h", cfg.p_spec.beta_h);
    cfg.p_spec.alpha_l = r.get_double("content", "alpha_l", cfg.p_spec.alpha_l);
    cfg.p_spec.beta_l = r.get_double("content", "beta_l", cfg.p_spec.beta_l);

    cfg.sim.gamma = r.get_double("engine", "gamma", cfg.sim.gamma);
    cfg.sim.mu_post = r.get_double("engine", "mu_post", cfg.sim.mu_post);
    cfg.sim.feed_capacity = r.get_u64("engine", "feed_capacity", cfg.sim.feed_capacity);
    cfg.sim.a_min = r.get_double("engine", "a_min", cfg.sim.a_min);
    cfg.sim.a_max = r.get_double("engine", "a_max", cfg.sim.a_max);
    cfg.sim.use_appeal = r.get_bool("engine", "use_appeal", cfg.sim.use_appeal);
    if (auto pop = r.get("engine", "popularity")) {
        if (*pop == "off") cfg.sim.popularity = PopularityMode::Off;
        else if (*pop == "linear") cfg.sim.popularity = PopularityMode::Linear;
        else if (*pop == "log") cfg.sim.popularity = PopularityMode::Log;
        else throw ParamError(r.where() + ": unknown popularity mode '" + *pop + "'");
    }
    cfg.sim.use_recency = r.get_bool("engine", "use_recency", cfg.sim.use_recency);
    cfg.sim.recency_decay = r.get_double("engine", "recency_decay", cfg.sim.recency_decay);

    cfg.sim.tau = r.get_double("removal", "tau", cfg.sim.tau);

    cfg.sim.rho = r.get_double("convergence", "rho", cfg.sim.rho);
    cfg.sim.epsilon = r.get_double("convergence", "epsilon", cfg.sim.epsilon);
    cfg.sim.warmup = static_cast<int>(r.get_u64("convergence", "warmup",
                                                static_cast<std::uint64_t>(cfg.sim.warmup)));
    cfg.sim.max_steps = static_cast<int>(
        r.get_u64("convergence", "max_steps", static_cast<std::uint64_t>(cfg.sim.max_steps)));

    cfg.tau_grid = r.get_double_list("experiment", "tau_grid", default_tau_grid());
    cfg.runs = r.get_u64("experiment", "runs", cfg.runs);
    cfg.workers = r.get_u64("experiment", "workers", cfg.workers);
    cfg.seed = r.get_u64("experiment", "seed", cfg.seed);
    cfg.bootstrap_resamples =
        r.get_u64("experiment", "bootstrap_resamples", cfg.bootstrap_resamples);
    cfg.paired_bootstrap = r.get_bool("experiment", "paired_bootstrap", cfg.paired_bootstrap);
    cfg.fixed_horizon = r.get_bool("experiment", "fixed_horizon", cfg.fixed_horizon);

    r.reject_unknown();
    cfg.p_spec.validate();
    if (target_p_given) {
        calib::check_target_mean(cfg.p_spec, cfg.target_p);
    } else {
        cfg.target_p = cfg.p_spec.analytic_mean();
    }
    return cfg;
}

inline AppConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config: " + path);
    return load_config(in, path);
}

}  // namespace tdsim
