#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "polya/dynamics.hpp"

namespace polya {

enum class Regime { Interior, ConsensusDegenerate };

inline const char* to_string(Regime r) {
    return r == Regime::Interior ? "Interior" : "ConsensusDegenerate";
}

inline constexpr double kDefaultEpsDegenerate = 1e-6;

struct AgentEstimate {
    std::optional<double> gamma_hat;
    std::optional<int> phi_hat;
    Regime regime = Regime::Interior;
    double beta = 0.0;  // the (averaged) inputs the estimate was formed from
    double mu = 0.0;
};

namespace detail {

inline bool degenerate(double beta, double mu, double eps) {
    return !(beta > eps && beta < 1.0 - eps && mu > eps && mu < 1.0 - eps);
}

}  // namespace detail

/// gamma_hat = beta (1 - mu) / ((1 - beta) mu): the bias that makes beta = f(mu, gamma_hat).
/// nullopt when beta or mu is within eps of 0 or 1 (the consensus regime).
inline std::optional<double> estimate_bias(double beta, double mu, double eps = kDefaultEpsDegenerate) {
    if (detail::degenerate(beta, mu, eps)) return std::nullopt;
    return beta / (1.0 - beta) * ((1.0 - mu) / mu);
}

/// phi_hat = 1 iff beta > mu, i.e. iff gamma_hat > 1. nullopt on ties
/// (|beta - mu| < eps) and in the degenerate regime.
inline std::optional<int> estimate_belief(double beta, double mu, double eps = kDefaultEpsDegenerate) {
    if (detail::degenerate(beta, mu, eps) || std::abs(beta - mu) < eps) return std::nullopt;
    return beta > mu ? 1 : 0;
}

inline AgentEstimate estimate_agent(double beta, double mu, double eps = kDefaultEpsDegenerate) {
    AgentEstimate e;
    e.beta = beta;
    e.mu = mu;
    e.regime = detail::degenerate(beta, mu, eps) ? Regime::ConsensusDegenerate : Regime::Interior;
    e.gamma_hat = estimate_bias(beta, mu, eps);
    e.phi_hat = estimate_belief(beta, mu, eps);
    return e;
}

/// Per-agent estimates from the mean (beta, mu) over the last `window` records.
inline std::vector<AgentEstimate> infer_all(const Trajectory& traj, std::size_t window,
                                            double eps = kDefaultEpsDegenerate) {
    if (window == 0) throw InvalidArgument("inference window must be >= 1");
    if (traj.records.size() < window) {
        throw InvalidArgument("trajectory has " + std::to_string(traj.records.size()) +
                              " records, fewer than the window of " + std::to_string(window));
    }
    const auto first = traj.records.end() - static_cast<std::ptrdiff_t>(window);
    Vector beta = Vector::Zero(first->beta.size());
    Vector mu = Vector::Zero(first->mu.size());
    for (auto it = first; it != traj.records.end(); ++it) {
        beta += it->beta;
        mu += it->mu;
    }
    beta /= static_cast<double>(window);
    mu /= static_cast<double>(window);

    std::vector<AgentEstimate> out;
    out.reserve(static_cast<std::size_t>(beta.size()));
    for (Eigen::Index i = 0; i < beta.size(); ++i) out.push_back(estimate_agent(beta[i], mu[i], eps));
    return out;
}

/// Last 10% of the records, at least one.
inline std::size_t default_window(const Trajectory& traj) {
    return std::max<std::size_t>(1, traj.records.size() / 10);
}

}  // namespace polya
