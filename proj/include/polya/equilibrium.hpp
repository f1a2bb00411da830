#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/LU>

#include "polya/jacobian.hpp"

namespace polya {

enum class EquilibriumKind { AllZeros, AllOnes, Interior };
enum class Stability { Unknown, Stable, Unstable, Marginal };

struct Equilibrium {
    Vector beta;
    EquilibriumKind kind = EquilibriumKind::Interior;
    double residual = 0.0;  // ||F(beta) - beta||_inf
    Stability stability = Stability::Unknown;
};

struct EquilibriumReport {
    std::vector<Equilibrium> equilibria;
    std::size_t starts_used = 0;
    std::size_t failures = 0;
    std::size_t boundary_hits = 0;  // starts whose solve landed on 0 or 1
};

/// Componentwise (gamma_i - 1) beta_i mu_i + beta_i - gamma_i mu_i with mu = W beta.
/// Vanishes exactly where F(beta) = beta.
inline Vector residual(const Vector& beta, const Graph& g, const BiasProfile& bias) {
    detail::require_size(beta, g.size(), "beta");
    detail::require_unit_cube(beta, "beta");
    if (bias.size() != g.size()) throw InvalidArgument("bias profile size does not match graph");
    const Vector mu = g.walk() * beta;
    const Vector& gamma = bias.gamma();
    return ((gamma.array() - 1.0) * beta.array() * mu.array() + beta.array() -
            gamma.array() * mu.array())
        .matrix();
}

inline double fixed_point_gap(const Vector& beta, const Graph& g, const BiasProfile& bias) {
    return (expected_map(beta, g, bias) - beta).lpNorm<Eigen::Infinity>();
}

/// The all-zeros and all-ones vectors, always equilibria.
inline std::pair<Equilibrium, Equilibrium> boundary_equilibria(std::size_t n) {
    const auto size = static_cast<Eigen::Index>(n);
    return {Equilibrium{Vector::Zero(size), EquilibriumKind::AllZeros, 0.0, Stability::Unknown},
            Equilibrium{Vector::Ones(size), EquilibriumKind::AllOnes, 0.0, Stability::Unknown}};
}

inline bool is_equilibrium(const Vector& beta, const Graph& g, const BiasProfile& bias, double tol) {
    return fixed_point_gap(beta, g, bias) < tol;
}

struct SolverOptions {
    double tol = 1e-12;             // Newton stops at ||F(beta) - beta||_inf < tol
    std::size_t max_iter = 100000;  // damped fixed-point cap; Newton gets max_newton
    std::size_t max_newton = 100;
    double damping = 0.5;           // eta in beta <- (1 - eta) beta + eta F(beta)
    double clip = 1e-12;            // iterates kept in [clip, 1 - clip]
    double dedup_tol = 1e-6;
    double boundary_band = 1e-6;
};

/// Outcome of refining a single start, before boundary filtering.
struct RefineResult {
    Vector beta;
    double gap = 0.0;
    bool converged = false;
};

/// Damped fixed-point iteration to ||F - beta|| < sqrt(tol), then Newton on
/// G(beta) = F(beta) - beta with Jacobian S_beta - I (backtracking on the
/// gap). Newton runs even when the first phase stalls, so unstable interior
/// equilibria that repel the fixed-point map can still be reached.
inline RefineResult refine_equilibrium(const Vector& start, const Graph& g, const BiasProfile& bias,
                                       const SolverOptions& opts = {}) {
    const double lo = opts.clip;
    const double hi = 1.0 - opts.clip;
    const auto clip = [&](Vector v) {
        return Vector(v.array().max(lo).min(hi));
    };

    Vector beta = clip(start);
    const double loose = std::sqrt(opts.tol);
    for (std::size_t it = 0; it < opts.max_iter; ++it) {
        const Vector fb = expected_map(beta, g, bias);
        if ((fb - beta).lpNorm<Eigen::Infinity>() < loose) break;
        beta = clip((1.0 - opts.damping) * beta + opts.damping * fb);
    }

    const Eigen::Index n = beta.size();
    const Matrix identity = Matrix::Identity(n, n);
    Vector gap_vec = expected_map(beta, g, bias) - beta;
    double gap = gap_vec.lpNorm<Eigen::Infinity>();
    for (std::size_t it = 0; it < opts.max_newton && !(gap < opts.tol); ++it) {
        const Matrix jac = jacobian(beta, g, bias).dense() - identity;
        const Vector step = jac.partialPivLu().solve(-gap_vec);
        if (!step.allFinite()) break;
        double scale = 1.0;
        bool improved = false;
        for (int halvings = 0; halvings < 40; ++halvings, scale *= 0.5) {
            const Vector trial = clip(beta + scale * step);
            const Vector trial_gap = expected_map(trial, g, bias) - trial;
            const double trial_norm = trial_gap.lpNorm<Eigen::Infinity>();
            if (trial_norm < gap) {
                beta = trial;
                gap_vec = trial_gap;
                gap = trial_norm;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    return {beta, gap, gap < opts.tol};
}

namespace detail {

inline std::vector<int> first_primes(std::size_t count) {
    std::vector<int> primes;
    for (int c = 2; primes.size() < count; ++c) {
        bool prime = true;
        for (int p : primes) {
            if (p * p > c) break;
            if (c % p == 0) {
                prime = false;
                break;
            }
        }
        if (prime) primes.push_back(c);
    }
    return primes;
}

inline double radical_inverse(std::size_t index, int base) {
    double result = 0.0;
    double f = 1.0 / base;
    while (index > 0) {
        result += f * static_cast<double>(index % static_cast<std::size_t>(base));
        index /= static_cast<std::size_t>(base);
        f /= base;
    }
    return result;
}

}  // namespace detail

/// Default multistart set: the lattice {1/4, 1/2, 3/4}^n truncated to 64
/// points when n <= 4, otherwise the first 64 Halton points (all strictly interior).
inline std::vector<Vector> default_starts(std::size_t n) {
    constexpr std::size_t kMaxStarts = 64;
    std::vector<Vector> starts;
    const auto size = static_cast<Eigen::Index>(n);
    if (n <= 4) {
        std::size_t total = 1;
        for (std::size_t i = 0; i < n; ++i) total *= 3;
        total = std::min(total, kMaxStarts);
        for (std::size_t k = 0; k < total; ++k) {
            Vector v(size);
            std::size_t code = k;
            for (Eigen::Index i = 0; i < size; ++i) {
                v[i] = 0.25 * static_cast<double>(code % 3 + 1);
                code /= 3;
            }
            starts.push_back(std::move(v));
        }
    } else {
        const auto primes = detail::first_primes(n);
        for (std::size_t k = 1; k <= kMaxStarts; ++k) {
            Vector v(size);
            for (Eigen::Index i = 0; i < size; ++i) {
                v[i] = detail::radical_inverse(k, primes[static_cast<std::size_t>(i)]);
            }
            starts.push_back(std::move(v));
        }
    }
    return starts;
}

/// Multistart search for interior equilibria. Starts that end within
/// `boundary_band` of 0 or 1 in any component count as boundary hits; the
/// converged rest are deduplicated in start order at `dedup_tol`.
inline EquilibriumReport solve_interior(const Graph& g, const BiasProfile& bias,
                                        const std::vector<Vector>& starts,
                                        const SolverOptions& opts = {}) {
    if (bias.size() != g.size()) throw InvalidArgument("bias profile size does not match graph");
    if (bias.is_identity()) {
        throw ValidationError("Gamma = I: every uniform vector is an equilibrium; the model assumes Gamma != I");
    }
    for (const Vector& s : starts) {
        detail::require_size(s, g.size(), "start");
        if (!((s.array() > 0.0).all() && (s.array() < 1.0).all())) {
            throw InvalidArgument("solver starts must lie strictly inside (0,1)^n");
        }
    }

    EquilibriumReport report;
    report.starts_used = starts.size();
    for (const Vector& start : starts) {
        const RefineResult r = refine_equilibrium(start, g, bias, opts);
        // Checked before convergence: the clip keeps a boundary-bound iterate
        // a few ulps short of its gap tolerance.
        const double lowest = r.beta.minCoeff();
        const double highest = r.beta.maxCoeff();
        if (lowest < opts.boundary_band || highest > 1.0 - opts.boundary_band) {
            ++report.boundary_hits;
            continue;
        }
        if (!r.converged) {
            ++report.failures;
            continue;
        }
        const bool duplicate = std::any_of(
            report.equilibria.begin(), report.equilibria.end(), [&](const Equilibrium& e) {
                return (e.beta - r.beta).lpNorm<Eigen::Infinity>() < opts.dedup_tol;
            });
        if (!duplicate) {
            report.equilibria.push_back({r.beta, EquilibriumKind::Interior, r.gap, Stability::Unknown});
        }
    }
    return report;
}

inline EquilibriumReport solve_interior(const Graph& g, const BiasProfile& bias,
                                        const SolverOptions& opts = {}) {
    return solve_interior(g, bias, default_starts(g.size()), opts);
}

/// The two-agent community network: agent a with bias gamma > 1 keeps a
/// share p1 of its edge weight in-community, agent b with bias 1/gamma keeps p2.
struct CommunityNetwork {
    double gamma;
    double p1;
    double p2;

    /// max{p1/p2, p2/p1} < gamma, written without division.
    bool has_interior() const { return p1 < gamma * p2 && p2 < gamma * p1; }

    Matrix walk() const {
        Matrix w(2, 2);
        w << p1, 1.0 - p1, 1.0 - p2, p2;
        return w;
    }
};

/// Symmetric realisation A = diag(1 - p2, 1 - p1) W: self-loops p1 (1 - p2)
/// and p2 (1 - p1), cross weight (1 - p1)(1 - p2). Needs p1, p2 in [0, 1).
inline Graph community_graph(double p1, double p2) {
    detail::require_probability(p1, "p1");
    detail::require_probability(p2, "p2");
    if (p1 >= 1.0 || p2 >= 1.0) {
        throw InvalidArgument("community graph needs p1, p2 < 1 (otherwise the agents are disconnected)");
    }
    std::vector<Edge> edges;
    if (p1 > 0.0) edges.push_back({1, 1, p1 * (1.0 - p2)});
    if (p2 > 0.0) edges.push_back({2, 2, p2 * (1.0 - p1)});
    edges.push_back({1, 2, (1.0 - p1) * (1.0 - p2)});
    return build_graph(2, edges);
}

/// Interior equilibrium of the community network from its closed form, or
/// nullopt when max{p1/p2, p2/p1} >= gamma.
inline std::optional<Vector> community_interior(double gamma, double p1, double p2) {
    const CommunityNetwork net{gamma, p1, p2};
    if (!net.has_interior()) return std::nullopt;
    const double root = std::sqrt(p1 * p2);
    const double delta =
        std::sqrt(4.0 * gamma * (1.0 - p1 - p2) + (gamma + 1.0) * (gamma + 1.0) * p1 * p2);
    const double common = (gamma + 1.0) * p1 * p2 + root * delta;
    const double denom = (gamma - 1.0) * common;
    Vector beta(2);
    beta[0] = gamma * (common - 2.0 * p2) / denom;
    beta[1] = (2.0 * gamma * p1 - common) / denom;
    return beta;
}

/// Boundary points plus, when it exists, the closed-form interior point.
/// Residuals are measured with W = [[p1, 1-p1], [1-p2, p2]] directly.
inline EquilibriumReport community_closed_form(double gamma, double p1, double p2) {
    if (!(gamma > 1.0) || !std::isfinite(gamma)) {
        throw InvalidArgument("community closed form needs gamma > 1; use solve_interior otherwise");
    }
    detail::require_probability(p1, "p1");
    detail::require_probability(p2, "p2");

    const CommunityNetwork net{gamma, p1, p2};
    auto [zeros, ones] = boundary_equilibria(2);
    EquilibriumReport report;
    report.equilibria = {zeros, ones};
    if (auto interior = community_interior(gamma, p1, p2)) {
        const Vector mu = net.walk() * *interior;
        const double gap = std::max(std::abs(detail::conform(mu[0], gamma) - (*interior)[0]),
                                    std::abs(detail::conform(mu[1], 1.0 / gamma) - (*interior)[1]));
        report.equilibria.push_back({*interior, EquilibriumKind::Interior, gap, Stability::Unknown});
    }
    return report;
}

}  // namespace polya
