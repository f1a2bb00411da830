#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "polya/config.hpp"
#include "polya/equilibrium.hpp"
#include "polya/inference.hpp"
#include "polya/io.hpp"
#include "polya/lyapunov.hpp"
#include "polya/montecarlo.hpp"
#include "polya/spectral.hpp"

namespace polya::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kValidationRefusal = 3, kNumericalFailure = 4 };

struct Options {
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;
    std::filesystem::path out = ".";
    std::optional<std::size_t> runs;
    bool allow_invalid = false;
    std::filesystem::path trajectory;
    std::optional<std::size_t> samples;
};

namespace detail {

using nlohmann::json;

inline std::uint64_t effective_seed(const Options& opt, const RunConfig& cfg, std::ostream& out) {
    std::uint64_t seed = 0;
    if (opt.seed) {
        seed = *opt.seed;
    } else if (cfg.seed) {
        seed = *cfg.seed;
    } else {
        std::random_device rd;
        seed = (std::uint64_t{rd()} << 32) ^ rd();
    }
    out << "seed: " << seed << '\n';
    return seed;
}

inline Graph checked_graph(const RunConfig& cfg, const Options& opt, std::ostream& err) {
    Graph g = [&] {
        try {
            return cfg.graph();
        } catch (const InvalidArgument& e) {
            throw ConfigError("graph", e.what());
        }
    }();
    const ValidationReport v = validate(g);
    if (!v.ok) {
        std::string why;
        if (!v.connected) why += " disconnected";
        if (v.bipartite) why += " bipartite";
        if (!(v.min_degree > 0.0)) why += " zero-degree-agent";
        if (!opt.allow_invalid) throw ValidationError("graph failed validation:" + why);
        err << "warning: graph failed validation:" << why << " (continuing, --allow-invalid)\n";
    }
    return g;
}

inline json to_json(const Vector& v) { return std::vector<double>(v.begin(), v.end()); }

// Linear interpolation between order statistics.
inline double quantile(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    const double pos = q * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const auto hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

inline json aggregate(const std::vector<Vector>& finals) {
    json agents = json::array();
    const auto n = finals.front().size();
    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<double> xs;
        xs.reserve(finals.size());
        for (const Vector& f : finals) xs.push_back(f[i]);
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        agents.push_back({{"agent", i + 1},
                          {"mean", mean},
                          {"median", quantile(xs, 0.5)},
                          {"q05", quantile(xs, 0.05)},
                          {"q25", quantile(xs, 0.25)},
                          {"q75", quantile(xs, 0.75)},
                          {"q95", quantile(xs, 0.95)}});
    }
    return agents;
}

inline Stability label(double lambda, double eps) {
    if (lambda < 1.0 - eps) return Stability::Stable;
    if (lambda > 1.0 + eps) return Stability::Unstable;
    return Stability::Marginal;
}

inline json summary_header(const char* command, const RunConfig& cfg) {
    return {{"schema_version", kSchemaVersion}, {"command", command}, {"config", polya::to_json(cfg)}};
}

inline void ensure_out_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("out", "cannot create " + dir.string() + ": " + ec.message());
}

// A two-agent instance with biases (gamma, 1/gamma) is a community network
// with p1 = W_11, p2 = W_22. Agents are swapped when agent 1 has the smaller bias.
struct CommunityMatch {
    CommunityNetwork net;
    bool swapped;
};

inline std::optional<CommunityMatch> match_community(const Graph& g, const BiasProfile& bias) {
    if (g.size() != 2) return std::nullopt;
    const double ga = bias.gamma()[0];
    const double gb = bias.gamma()[1];
    if (std::abs(ga * gb - 1.0) > 1e-12 || ga == gb) return std::nullopt;
    const Matrix& w = g.walk();
    if (ga > 1.0) return CommunityMatch{{ga, w(0, 0), w(1, 1)}, false};
    return CommunityMatch{{gb, w(1, 1), w(0, 0)}, true};
}

inline SolverOptions solver_options(const RunConfig& cfg) {
    SolverOptions s;
    s.tol = cfg.options.tol;
    s.max_iter = cfg.options.max_iter;
    s.damping = cfg.options.damping;
    return s;
}

}  // namespace detail

inline int cmd_simulate(const RunConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err) {
    const Graph g = detail::checked_graph(cfg, opt, err);
    const BiasProfile bias = cfg.bias();
    if (bias.is_identity()) err << "warning: Gamma = I, the unbiased process (no consensus analysis applies)\n";
    const std::uint64_t seed = detail::effective_seed(opt, cfg, out);
    const std::size_t runs = opt.runs.value_or(cfg.runs);
    if (runs < 1) throw ConfigError("runs", "must be >= 1");
    detail::ensure_out_dir(opt.out);

    RunConfig echo = cfg;
    echo.seed = seed;
    echo.runs = runs;
    nlohmann::json summary = detail::summary_header("simulate", echo);
    summary["seed"] = seed;

    std::vector<Trajectory> trajs;
    if (runs == 1) {
        trajs.push_back(simulate(g, bias, cfg.init(), cfg.steps, seed, cfg.stride));
        write_trajectory_csv(opt.out / "trajectory.csv", trajs.front());
    } else {
        trajs = simulate_batch(g, bias, cfg.init(), cfg.steps, seed, cfg.stride, runs);
        for (std::size_t r = 0; r < runs; ++r) {
            write_trajectory_csv(opt.out / ("trajectory_" + std::to_string(r) + ".csv"), trajs[r]);
        }
    }

    nlohmann::json per_run = nlohmann::json::array();
    std::vector<Vector> finals;
    for (std::size_t r = 0; r < trajs.size(); ++r) {
        finals.push_back(trajs[r].final_state.beta);
        per_run.push_back({{"run", r},
                           {"seed", trajs[r].seed},
                           {"t", trajs[r].final_state.t},
                           {"final_beta", detail::to_json(trajs[r].final_state.beta)}});
    }
    summary["runs"] = per_run;
    summary["aggregate"] = detail::aggregate(finals);
    write_json(opt.out / "summary.json", summary);
    out << "wrote " << trajs.size() << " trajectory file(s) and summary.json to " << opt.out.string() << '\n';
    return kOk;
}

inline int cmd_classify(const RunConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err) {
    const Graph g = detail::checked_graph(cfg, opt, err);
    const ConsensusClassification c = classify_consensus(g, cfg.bias(), cfg.options.eps_lambda);
    detail::ensure_out_dir(opt.out);
    nlohmann::json summary = detail::summary_header("classify", cfg);
    summary["classification"] = {{"lambda0", c.lambda0},
                                 {"lambda1", c.lambda1},
                                 {"verdict", to_string(c.verdict)},
                                 {"marginal", c.marginal}};
    write_json(opt.out / "classify.json", summary);
    out << "verdict: " << to_string(c.verdict) << " (lambda0 = " << c.lambda0 << ", lambda1 = " << c.lambda1
        << (c.marginal ? ", marginal" : "") << ")\n";
    return kOk;
}

inline int cmd_equilibria(const RunConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err) {
    const Graph g = detail::checked_graph(cfg, opt, err);
    const BiasProfile bias = cfg.bias();
    const double eps = cfg.options.eps_lambda;
    const SolverOptions sopts = detail::solver_options(cfg);

    const EquilibriumReport numeric = solve_interior(g, bias, sopts);
    std::vector<Equilibrium> list;
    auto [zeros, ones] = boundary_equilibria(g.size());
    zeros.residual = fixed_point_gap(zeros.beta, g, bias);
    ones.residual = fixed_point_gap(ones.beta, g, bias);
    zeros.stability = detail::label(lambda_max(jacobian(zeros.beta, g, bias)), eps);
    ones.stability = detail::label(lambda_max(jacobian(ones.beta, g, bias)), eps);
    list.push_back(zeros);
    list.push_back(ones);

    nlohmann::json closed = nullptr;
    if (const auto match = detail::match_community(g, bias)) {
        std::optional<Vector> interior = community_interior(match->net.gamma, match->net.p1, match->net.p2);
        if (interior && match->swapped) std::swap((*interior)[0], (*interior)[1]);
        double deviation = 0.0;
        bool agrees = numeric.equilibria.size() == (interior ? 1u : 0u);
        if (interior && !numeric.equilibria.empty()) {
            deviation = (numeric.equilibria.front().beta - *interior).lpNorm<Eigen::Infinity>();
            agrees = agrees && deviation < 1e-8;
        }
        closed = {{"gamma", match->net.gamma},
                  {"p1", match->net.p1},
                  {"p2", match->net.p2},
                  {"agents_swapped", match->swapped},
                  {"interior", interior ? detail::to_json(*interior) : nlohmann::json(nullptr)},
                  {"numeric_interior_count", numeric.equilibria.size()},
                  {"max_deviation", deviation},
                  {"agrees", agrees}};
        if (!agrees) err << "warning: closed form and numeric solver disagree\n";
        if (interior) {
            Equilibrium eq{*interior, EquilibriumKind::Interior, fixed_point_gap(*interior, g, bias),
                           Stability::Unknown};
            if (!(eq.residual < sopts.tol)) {
                const RefineResult polished = refine_equilibrium(*interior, g, bias, sopts);
                eq.beta = polished.beta;
                eq.residual = polished.gap;
            }
            list.push_back(eq);
        }
    } else {
        list.insert(list.end(), numeric.equilibria.begin(), numeric.equilibria.end());
    }

    nlohmann::json eqs = nlohmann::json::array();
    for (Equilibrium& e : list) {
        const double lambda = lambda_max(jacobian(e.beta, g, bias));
        if (e.kind == EquilibriumKind::Interior) e.stability = classify_interior(e, g, bias, eps);
        eqs.push_back({{"kind", to_string(e.kind)},
                       {"beta", detail::to_json(e.beta)},
                       {"residual", e.residual},
                       {"lambda_max", lambda},
                       {"stability", to_string(e.stability)}});
        out << to_string(e.kind) << " [";
        for (Eigen::Index i = 0; i < e.beta.size(); ++i) out << (i ? ", " : "") << e.beta[i];
        out << "] residual " << e.residual << ", " << to_string(e.stability) << '\n';
    }

    detail::ensure_out_dir(opt.out);
    nlohmann::json summary = detail::summary_header("equilibria", cfg);
    summary["equilibria"] = eqs;
    summary["solver"] = {{"starts_used", numeric.starts_used},
                         {"failures", numeric.failures},
                         {"boundary_hits", numeric.boundary_hits}};
    summary["closed_form"] = closed;
    write_json(opt.out / "equilibria.json", summary);
    if (numeric.failures > 0) err << "note: " << numeric.failures << " solver start(s) did not converge\n";
    return kOk;
}

inline int cmd_infer(const std::optional<RunConfig>& cfg, const Options& opt, std::ostream& out,
                     std::ostream&) {
    if (opt.trajectory.empty()) throw ConfigError("trajectory", "missing --trajectory");
    const Trajectory traj = read_trajectory_csv(opt.trajectory);
    const auto n = static_cast<std::size_t>(traj.records.front().beta.size());
    if (cfg && cfg->n != n) {
        throw ConfigError("trajectory", "has " + std::to_string(n) + " agents but the config has " +
                                            std::to_string(cfg->n));
    }
    const RunOptions ro = cfg ? cfg->options : RunOptions{};
    const std::size_t window = ro.window.value_or(default_window(traj));
    if (window > traj.records.size()) {
        throw ConfigError("options.window", "trajectory has " + std::to_string(traj.records.size()) +
                                                " records, fewer than the window of " + std::to_string(window));
    }
    const auto estimates = infer_all(traj, window, ro.eps_degenerate);

    nlohmann::json agents = nlohmann::json::array();
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const AgentEstimate& e = estimates[i];
        agents.push_back({{"agent", i + 1},
                          {"gamma_hat", e.gamma_hat ? nlohmann::json(*e.gamma_hat) : nlohmann::json("Undefined")},
                          {"phi_hat", e.phi_hat ? nlohmann::json(*e.phi_hat) : nlohmann::json("Undefined")},
                          {"regime", to_string(e.regime)},
                          {"beta", e.beta},
                          {"mu", e.mu}});
        out << "agent " << i + 1 << ": " << to_string(e.regime);
        if (e.gamma_hat) out << ", gamma_hat " << *e.gamma_hat;
        if (e.phi_hat) out << ", phi_hat " << *e.phi_hat;
        out << '\n';
    }
    detail::ensure_out_dir(opt.out);
    nlohmann::json summary = {{"schema_version", kSchemaVersion},
                              {"command", "infer"},
                              {"trajectory", opt.trajectory.string()},
                              {"records", traj.records.size()},
                              {"window", window},
                              {"estimates", agents}};
    if (cfg) summary["config"] = polya::to_json(*cfg);
    write_json(opt.out / "estimates.json", summary);
    return kOk;
}

/// Uniform samples on the unit cube plus both boundary points. Exit 4 when
/// any descent exceeds 1e-12.
inline int cmd_lyapunov_check(const RunConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err) {
    constexpr double kDescentTol = 1e-12;
    constexpr double kNearZero = -1e-10;
    constexpr double kNearEquilibrium = 1e-4;

    const Graph g = detail::checked_graph(cfg, opt, err);
    const BiasProfile bias = cfg.bias();
    const std::size_t samples = opt.samples.value_or(cfg.options.samples);
    if (samples < 1) throw ConfigError("samples", "must be >= 1");
    const std::uint64_t seed = detail::effective_seed(opt, cfg, out);
    detail::ensure_out_dir(opt.out);

    Rng rng(seed);
    const auto n = static_cast<Eigen::Index>(g.size());
    std::vector<Vector> points;
    points.reserve(samples + 2);
    for (std::size_t s = 0; s < samples; ++s) {
        Vector b(n);
        for (Eigen::Index i = 0; i < n; ++i) b[i] = rng.uniform();
        points.push_back(std::move(b));
    }
    points.push_back(Vector::Zero(n));
    points.push_back(Vector::Ones(n));

    double max_descent = -std::numeric_limits<double>::infinity();
    double worst_product = -std::numeric_limits<double>::infinity();
    std::size_t near_zero = 0;
    std::size_t near_zero_far = 0;
    std::size_t sign_violations = 0;
    std::string csv = "sample,descent,gap,worst_sign_product\n";
    for (std::size_t s = 0; s < points.size(); ++s) {
        const double d = descent(points[s], g, bias);
        const double gap = fixed_point_gap(points[s], g, bias);
        const double prod = worst_sign_product(points[s], g, bias);
        max_descent = std::max(max_descent, d);
        worst_product = std::max(worst_product, prod);
        if (prod > 0.0) ++sign_violations;
        if (d > kNearZero) {
            ++near_zero;
            if (!(gap < kNearEquilibrium)) ++near_zero_far;
        }
        polya::detail::append_number(csv, static_cast<std::uint64_t>(s));
        for (double x : {d, gap, prod}) {
            csv.push_back(',');
            polya::detail::append_number(csv, x);
        }
        csv.push_back('\n');
    }
    {
        std::ofstream f(opt.out / "lyapunov_samples.csv", std::ios::binary);
        if (!f) throw ConfigError("out", "cannot write lyapunov_samples.csv");
        f << csv;
    }

    const bool ok = max_descent <= kDescentTol;
    RunConfig echo = cfg;
    echo.seed = seed;
    echo.options.samples = samples;
    nlohmann::json summary = detail::summary_header("lyapunov-check", echo);
    summary["seed"] = seed;
    summary["report"] = {{"samples", points.size()},
                         {"max_descent", max_descent},
                         {"near_zero_count", near_zero},
                         {"near_zero_not_near_equilibrium", near_zero_far},
                         {"worst_sign_product", worst_product},
                         {"sign_violations", sign_violations},
                         {"boundary_descent", {descent(points[samples], g, bias), descent(points[samples + 1], g, bias)}},
                         {"ok", ok}};
    write_json(opt.out / "lyapunov.json", summary);
    out << "max descent " << max_descent << ", near-zero " << near_zero << " (" << near_zero_far
        << " not near an equilibrium), worst sign product " << worst_product << '\n';
    return ok ? kOk : kNumericalFailure;
}

/// Runs one subcommand and maps failures onto the exit-code contract.
inline int run(const std::string& command, const Options& opt, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    try {
        std::optional<RunConfig> cfg;
        if (!opt.config.empty()) {
            cfg = load_config(opt.config);
        } else if (command != "infer") {
            throw ConfigError("config", "missing --config");
        }
        if (command == "simulate") return cmd_simulate(*cfg, opt, out, err);
        if (command == "classify") return cmd_classify(*cfg, opt, out, err);
        if (command == "equilibria") return cmd_equilibria(*cfg, opt, out, err);
        if (command == "infer") return cmd_infer(cfg, opt, out, err);
        if (command == "lyapunov-check") return cmd_lyapunov_check(*cfg, opt, out, err);
        throw ConfigError("command", "unknown command '" + command + "'");
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ValidationError& e) {
        err << "refused: " << e.what() << '\n';
        return kValidationRefusal;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << " (best estimate " << e.best_estimate() << ", residual "
            << e.residual() << ")\n";
        return kNumericalFailure;
    } catch (const InvalidArgument& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }
}

}  // namespace polya::cli
