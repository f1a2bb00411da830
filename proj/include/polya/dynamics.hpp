#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "polya/graph.hpp"
#include "polya/rng.hpp"

namespace polya {

namespace detail {

// f without argument checks, for inner loops whose inputs are known valid.
// Written as a / (a + b) with a, b >= 0 so the result never leaves [0, 1]
// and mu = 0, 1 map to exactly 0, 1.
inline double conform(double mu, double gamma) noexcept {
    const double a = gamma * mu;
    return a / (a + (1.0 - mu));
}

inline void require_gamma(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw InvalidArgument("bias parameter must be positive and finite, got " +
                              std::to_string(gamma));
    }
}

inline void require_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument(std::string(what) + " must lie in [0, 1], got " + std::to_string(p));
    }
}

}  // namespace detail

/// Probability that an agent with bias `gamma` declares 1 when the weighted
/// share of 1's it has observed is `mu`:  f(mu, gamma) = gamma mu / (1 + (gamma - 1) mu).
inline double conforming_probability(double mu, double gamma) {
    detail::require_probability(mu, "mu");
    detail::require_gamma(gamma);
    return detail::conform(mu, gamma);
}

/// Inverse of f in its first argument: f^-1(nu, gamma) = f(nu, 1/gamma).
inline double inverse_conforming(double nu, double gamma) {
    detail::require_probability(nu, "nu");
    detail::require_gamma(gamma);
    return detail::conform(nu, 1.0 / gamma);
}

/// Per-agent bias parameters gamma_i > 0. gamma_i > 1 tilts agent i towards
/// declaring 1, gamma_i < 1 towards 0.
class BiasProfile {
public:
    explicit BiasProfile(Vector gamma) : gamma_(std::move(gamma)) {
        if (gamma_.size() == 0) throw InvalidArgument("bias profile is empty");
        for (Eigen::Index i = 0; i < gamma_.size(); ++i) detail::require_gamma(gamma_[i]);
    }

    /// From inherent beliefs phi_i in {0,1} and honesty parameters >= 1:
    /// gamma_i = honesty_i if phi_i = 1, 1/honesty_i otherwise.
    static BiasProfile from_beliefs(const std::vector<int>& phi, const std::vector<double>& honesty) {
        if (phi.size() != honesty.size()) {
            throw InvalidArgument("belief and honesty vectors differ in length");
        }
        Vector gamma(static_cast<Eigen::Index>(phi.size()));
        for (std::size_t i = 0; i < phi.size(); ++i) {
            if (phi[i] != 0 && phi[i] != 1) throw InvalidArgument("inherent belief must be 0 or 1");
            if (!(honesty[i] >= 1.0) || !std::isfinite(honesty[i])) {
                throw InvalidArgument("honesty parameter must be finite and >= 1");
            }
            gamma[static_cast<Eigen::Index>(i)] = phi[i] == 1 ? honesty[i] : 1.0 / honesty[i];
        }
        return BiasProfile(std::move(gamma));
    }

    std::size_t size() const noexcept { return static_cast<std::size_t>(gamma_.size()); }
    const Vector& gamma() const noexcept { return gamma_; }
    double operator[](std::size_t i) const { return gamma_[static_cast<Eigen::Index>(i)]; }

    int belief(std::size_t i) const { return (*this)[i] > 1.0 ? 1 : 0; }
    double honesty(std::size_t i) const {
        const double g = (*this)[i];
        return g >= 1.0 ? g : 1.0 / g;
    }

    /// Gamma == I, which the consensus analysis excludes.
    bool is_identity() const { return (gamma_.array() == 1.0).all(); }

private:
    Vector gamma_;
};

/// b_i^1 in (0,1) for every agent (b_i^0 = 1 - b_i^1).
class InitialConditions {
public:
    explicit InitialConditions(Vector b1) : b1_(std::move(b1)) {
        for (Eigen::Index i = 0; i < b1_.size(); ++i) {
            if (!(b1_[i] > 0.0 && b1_[i] < 1.0)) {
                throw InvalidArgument("initial condition b1 component " + std::to_string(i + 1) +
                                      " must lie strictly inside (0, 1)");
            }
        }
    }

    static InitialConditions uniform(std::size_t n, double value = 0.5) {
        return InitialConditions(Vector::Constant(static_cast<Eigen::Index>(n), value));
    }

    const Vector& b1() const noexcept { return b1_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(b1_.size()); }

private:
    Vector b1_;
};

/// State of the declaration process at time t >= 1.
struct SimState {
    std::uint64_t t = 1;
    Vector beta;       // B^1(t) / t
    Vector mu;         // W beta(t), maintained incrementally
    Vector counts_b1;  // B^1(t) = b^1 + sum of 1-declarations
    std::vector<std::uint8_t> last_psi;  // declarations made at time t; empty at t = 1

    // Observation counts of agent i: M^1 = deg t mu, M^0 = deg t (1 - mu), M = deg t.
    double observed_ones(const Graph& g, std::size_t i) const {
        return g.degrees()[static_cast<Eigen::Index>(i)] * static_cast<double>(t) *
               mu[static_cast<Eigen::Index>(i)];
    }
    double observed_zeros(const Graph& g, std::size_t i) const {
        return g.degrees()[static_cast<Eigen::Index>(i)] * static_cast<double>(t) *
               (1.0 - mu[static_cast<Eigen::Index>(i)]);
    }
    double observed_total(const Graph& g, std::size_t i) const {
        return g.degrees()[static_cast<Eigen::Index>(i)] * static_cast<double>(t);
    }
};

struct TrajectoryRecord {
    std::uint64_t t;
    Vector beta;
    Vector mu;
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;
    std::uint64_t seed = 0;
    SimState final_state;
};

/// mu is recomputed from scratch every this many steps to cap drift from the
/// incremental update.
inline constexpr std::uint64_t kMuRefreshPeriod = std::uint64_t{1} << 16;

inline SimState init_state(const Graph& g, const InitialConditions& init) {
    detail::require_size(init.b1(), g.size(), "initial condition");
    SimState s;
    s.t = 1;
    s.beta = init.b1();
    s.counts_b1 = init.b1();
    s.mu = g.walk() * s.beta;
    return s;
}

/// One synchronous round: every agent draws from f(mu_i(t), gamma_i) using
/// mu(t) from before the round, agents consume uniforms in ascending index
/// order, then counts, beta and mu advance to t + 1.
inline void step_stochastic(SimState& state, const Graph& g, const BiasProfile& bias, Rng& rng) {
    const Matrix& w = g.walk();
    const Eigen::Index n = state.beta.size();
    state.last_psi.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = detail::conform(state.mu[i], bias.gamma()[i]);
        state.last_psi[static_cast<std::size_t>(i)] = rng.uniform() < p ? 1 : 0;
    }

    const double t = static_cast<double>(state.t);
    const double next = t + 1.0;
    state.mu *= t;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (state.last_psi[static_cast<std::size_t>(j)]) {
            state.counts_b1[j] += 1.0;
            state.mu += w.col(j);
        }
    }
    state.mu /= next;
    state.beta = state.counts_b1 / next;
    state.t += 1;
    if (state.t % kMuRefreshPeriod == 0) state.mu = w * state.beta;
}

namespace detail {

inline void check_run_inputs(const Graph& g, const BiasProfile& bias, const InitialConditions& init,
                             std::uint64_t steps, std::uint64_t stride) {
    if (bias.size() != g.size()) throw InvalidArgument("bias profile size does not match graph");
    if (init.size() != g.size()) throw InvalidArgument("initial condition size does not match graph");
    if (steps < 1) throw InvalidArgument("steps must be >= 1");
    if (stride < 1) throw InvalidArgument("stride must be >= 1");
}

// Record times: t = 1, 1 + stride, 1 + 2 stride, ... and always the final t.
inline bool is_record_time(std::uint64_t t, std::uint64_t steps, std::uint64_t stride) {
    return (t - 1) % stride == 0 || t == steps;
}

}  // namespace detail

/// Full stochastic dynamics from t = 1 to t = steps.
inline Trajectory simulate(const Graph& g, const BiasProfile& bias, const InitialConditions& init,
                           std::uint64_t steps, std::uint64_t seed, std::uint64_t stride = 1) {
    detail::check_run_inputs(g, bias, init, steps, stride);
    Trajectory traj;
    traj.seed = seed;
    Rng rng(seed);
    SimState s = init_state(g, init);
    traj.records.push_back({s.t, s.beta, s.mu});
    while (s.t < steps) {
        step_stochastic(s, g, bias, rng);
        if (detail::is_record_time(s.t, steps, stride)) traj.records.push_back({s.t, s.beta, s.mu});
    }
    traj.final_state = std::move(s);
    return traj;
}

/// F(beta, gamma)_i = f((W beta)_i, gamma_i).
inline Vector expected_map(const Vector& beta, const Graph& g, const BiasProfile& bias) {
    detail::require_size(beta, g.size(), "beta");
    detail::require_unit_cube(beta, "beta");
    if (bias.size() != g.size()) throw InvalidArgument("bias profile size does not match graph");
    const Vector mu = g.walk() * beta;
    Vector out(mu.size());
    for (Eigen::Index i = 0; i < mu.size(); ++i) out[i] = detail::conform(mu[i], bias.gamma()[i]);
    return out;
}

/// Deterministic expected dynamics beta(t+1) = beta(t) + (F(beta(t)) - beta(t)) / (t + 1),
/// started from any point of [0,1]^n (boundary starts are allowed here).
inline Trajectory integrate_expected(const Graph& g, const BiasProfile& bias, const Vector& start,
                                     std::uint64_t steps, std::uint64_t stride = 1) {
    detail::require_size(start, g.size(), "start");
    detail::require_unit_cube(start, "start");
    if (bias.size() != g.size()) throw InvalidArgument("bias profile size does not match graph");
    if (steps < 1) throw InvalidArgument("steps must be >= 1");
    if (stride < 1) throw InvalidArgument("stride must be >= 1");

    const Matrix& w = g.walk();
    const Vector& gamma = bias.gamma();
    Trajectory traj;
    Vector beta = start;
    Vector mu = w * beta;
    traj.records.push_back({1, beta, mu});
    for (std::uint64_t t = 1; t < steps; ++t) {
        const double step = 1.0 / static_cast<double>(t + 1);
        for (Eigen::Index i = 0; i < beta.size(); ++i) {
            beta[i] += (detail::conform(mu[i], gamma[i]) - beta[i]) * step;
        }
        mu.noalias() = w * beta;
        if (detail::is_record_time(t + 1, steps, stride)) traj.records.push_back({t + 1, beta, mu});
    }
    traj.final_state.t = steps;
    traj.final_state.beta = beta;
    traj.final_state.mu = mu;
    traj.final_state.counts_b1 = beta * static_cast<double>(steps);
    return traj;
}

inline Trajectory integrate_expected(const Graph& g, const BiasProfile& bias,
                                     const InitialConditions& init, std::uint64_t steps,
                                     std::uint64_t stride = 1) {
    return integrate_expected(g, bias, init.b1(), steps, stride);
}

}  // namespace polya
