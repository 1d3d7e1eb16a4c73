#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "tdsim/error.hpp"
#include "tdsim/rng.hpp"

namespace tdsim::calib {

/// Fraction of content that is illegal, from the shares of disappeared
/// content and of disappeared content later judged legal.
inline double illegal_ratio(double disappeared_over_total, double legal_over_disappeared) {
    if (!(disappeared_over_total >= 0.0 && disappeared_over_total <= 1.0) ||
        !(legal_over_disappeared >= 0.0 && legal_over_disappeared <= 1.0)) {
        throw ParamError("illegal_ratio: inputs must be in [0,1]");
    }
    return disappeared_over_total * (1.0 - legal_over_disappeared);
}

enum class ProbKind { Normal, Beta, TwoGroup };

inline const char* to_string(ProbKind k) {
    switch (k) {
        case ProbKind::Normal: return "normal";
        case ProbKind::Beta: return "beta";
        case ProbKind::TwoGroup: return "two-group";
    }
    return "?";
}

/// How illegal-posting probability is spread over the population. All three
/// kinds share the population mean; per-user draws are clamped to [0,1].
struct IllegalProbSpec {
    ProbKind kind = ProbKind::TwoGroup;
    // normal
    double mu = 0.01;
    double sigma = 0.001;
    // beta
    double alpha = 10.0;
    double beta = 990.0;
    // two-group: fraction s_h of users draw Beta(alpha_h, beta_h), the rest
    // Beta(alpha_l, beta_l)
    double s_h = 0.1;
    double alpha_h = 3.0;
    double beta_h = 30.0;
    double alpha_l = 0.1;
    double beta_l = 90.0;

    double analytic_mean() const {
        switch (kind) {
            case ProbKind::Normal: return mu;
            case ProbKind::Beta: return alpha / (alpha + beta);
            case ProbKind::TwoGroup:
                return s_h * alpha_h / (alpha_h + beta_h) +
                       (1.0 - s_h) * alpha_l / (alpha_l + beta_l);
        }
        return 0.0;
    }

    void validate() const {
        switch (kind) {
            case ProbKind::Normal:
                if (!(mu >= 0.0 && mu <= 1.0)) throw ParamError("illegal prob: mu outside [0,1]");
                if (sigma < 0.0) throw ParamError("illegal prob: sigma < 0");
                break;
            case ProbKind::Beta:
                if (!(alpha > 0.0) || !(beta > 0.0)) {
                    throw ParamError("illegal prob: beta parameters must be positive");
                }
                break;
            case ProbKind::TwoGroup:
                if (!(s_h >= 0.0 && s_h <= 1.0)) throw ParamError("illegal prob: s_h outside [0,1]");
                if (!(alpha_h > 0.0) || !(beta_h > 0.0) || !(alpha_l > 0.0) || !(beta_l > 0.0)) {
                    throw ParamError("illegal prob: beta parameters must be positive");
                }
                break;
        }
    }

    /// Spec with the same shape but mean rescaled to target (group means scale
    /// proportionally; alphas are re-solved with betas kept fixed).
    IllegalProbSpec with_mean(double target) const {
        if (!(target > 0.0 && target < 1.0)) throw ParamError("with_mean: target outside (0,1)");
        IllegalProbSpec s = *this;
        const double factor = target / analytic_mean();
        auto rescale = [&](double a, double b) {
            const double m = std::min(a / (a + b) * factor, 0.999);
            return m * b / (1.0 - m);
        };
        switch (kind) {
            case ProbKind::Normal:
                s.mu = target;
                s.sigma = sigma * factor;
                break;
            case ProbKind::Beta:
                s.alpha = rescale(alpha, beta);
                break;
            case ProbKind::TwoGroup:
                s.alpha_h = rescale(alpha_h, beta_h);
                s.alpha_l = rescale(alpha_l, beta_l);
                break;
        }
        return s;
    }
};

/// Verify the spec realises the claimed population mean before a run uses it.
inline void check_target_mean(const IllegalProbSpec& spec, double target_mean,
                              double tol = 1e-3) {
    if (std::abs(spec.analytic_mean() - target_mean) > tol) {
        throw ParamError("illegal prob spec mean " + std::to_string(spec.analytic_mean()) +
                         " misses target " + std::to_string(target_mean));
    }
}

/// Per-user illegal posting probabilities. Two-group membership is assigned
/// independently per user, so it differs run to run with the stream.
inline std::vector<double> sample_illegal_probs(const IllegalProbSpec& spec, std::size_t n,
                                                RandomStream& rng) {
    spec.validate();
    std::vector<double> probs(n);
    auto beta_draw = [&rng](double a, double b) {
        std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
        const double x = ga(rng.engine());
        const double y = gb(rng.engine());
        return x + y > 0.0 ? x / (x + y) : 0.0;
    };
    switch (spec.kind) {
        case ProbKind::Normal: {
            if (spec.sigma == 0.0) {
                std::fill(probs.begin(), probs.end(), spec.mu);
                break;
            }
            std::normal_distribution<double> dist(spec.mu, spec.sigma);
            for (auto& p : probs) p = std::clamp(dist(rng.engine()), 0.0, 1.0);
            break;
        }
        case ProbKind::Beta:
            for (auto& p : probs) p = beta_draw(spec.alpha, spec.beta);
            break;
        case ProbKind::TwoGroup:
            for (auto& p : probs) {
                p = rng.bernoulli(spec.s_h) ? beta_draw(spec.alpha_h, spec.beta_h)
                                            : beta_draw(spec.alpha_l, spec.beta_l);
            }
            break;
    }
    return probs;
}

}  // namespace tdsim::calib
