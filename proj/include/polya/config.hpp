#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polya/dynamics.hpp"
#include "polya/equilibrium.hpp"

namespace polya {

inline constexpr int kSchemaVersion = 1;

/// Malformed or inconsistent configuration; `field()` names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct RunOptions {
    double tol = 1e-12;
    std::size_t max_iter = 100000;
    double damping = 0.5;
    double eps_lambda = 1e-9;
    double eps_degenerate = 1e-6;
    std::optional<std::size_t> window;  // records; default is the last 10%
    std::size_t samples = 10000;

    bool operator==(const RunOptions&) const = default;
};

/// Everything a run needs, with the graph and biases already resolved
/// (community shorthand kept so the echo stays readable).
struct RunConfig {
    std::size_t n = 0;
    std::vector<Edge> edges;
    std::optional<CommunityNetwork> community;
    std::vector<double> gamma;
    std::vector<double> b1;
    std::uint64_t steps = 1000;
    std::optional<std::uint64_t> seed;
    std::uint64_t stride = 1;
    std::size_t runs = 1;
    RunOptions options;

    Graph graph() const { return build_graph(n, edges); }
    BiasProfile bias() const {
        return BiasProfile(Eigen::Map<const Vector>(gamma.data(), static_cast<Eigen::Index>(gamma.size())));
    }
    InitialConditions init() const {
        return InitialConditions(Eigen::Map<const Vector>(b1.data(), static_cast<Eigen::Index>(b1.size())));
    }

    bool operator==(const RunConfig& o) const {
        const auto same_edges = [&] {
            if (edges.size() != o.edges.size()) return false;
            for (std::size_t k = 0; k < edges.size(); ++k) {
                if (edges[k].i != o.edges[k].i || edges[k].j != o.edges[k].j ||
                    edges[k].weight != o.edges[k].weight) {
                    return false;
                }
            }
            return true;
        };
        const auto same_community = [&] {
            if (community.has_value() != o.community.has_value()) return false;
            return !community || (community->gamma == o.community->gamma &&
                                  community->p1 == o.community->p1 && community->p2 == o.community->p2);
        };
        return n == o.n && same_edges() && same_community() && gamma == o.gamma && b1 == o.b1 &&
               steps == o.steps && seed == o.seed && stride == o.stride && runs == o.runs &&
               options == o.options;
    }
};

namespace detail {

using nlohmann::json;

template <class T>
T get_field(const json& j, const std::string& key, const std::string& path) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(path + key, e.what());
    }
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& path) {
    if (!j.contains(key)) return fallback;
    return get_field<T>(j, key, path);
}

inline void parse_graph_object(const json& j, RunConfig& cfg, const std::string& path) {
    cfg.n = get_field<std::size_t>(j, "n", path);
    if (cfg.n == 0) throw ConfigError(path + "n", "must be positive");
    const json& edges = j.contains("edges") ? j.at("edges") : json::array();
    if (!edges.is_array()) throw ConfigError(path + "edges", "must be an array of [i, j, w]");
    cfg.edges.clear();
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const json& e = edges[k];
        const std::string where = path + "edges[" + std::to_string(k) + "]";
        if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
            !e[2].is_number()) {
            throw ConfigError(where, "expected [i, j, weight] with integer endpoints");
        }
        const auto i = e[0].get<long long>();
        const auto jj = e[1].get<long long>();
        if (i < 1 || jj < 1) throw ConfigError(where, "endpoints are 1-based");
        cfg.edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(jj), e[2].get<double>()});
    }
}

inline json read_json_file(const std::filesystem::path& p, const std::string& field) {
    std::ifstream in(p);
    if (!in) throw ConfigError(field, "cannot open " + p.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(field, std::string("invalid JSON in ") + p.string() + ": " + e.what());
    }
}

}  // namespace detail

/// Parses a config document. Relative graph-file paths resolve against `base_dir`.
inline RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
    using detail::get_field;
    using detail::get_or;
    if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
    if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion) {
        throw ConfigError("schema_version", "unsupported version " + j.at("schema_version").dump());
    }

    RunConfig cfg;
    if (j.contains("community")) {
        const auto& c = j.at("community");
        CommunityNetwork net{get_field<double>(c, "gamma", "community."),
                             get_field<double>(c, "p1", "community."),
                             get_field<double>(c, "p2", "community.")};
        if (!(net.gamma > 0.0)) throw ConfigError("community.gamma", "must be positive");
        try {
            const Graph g = community_graph(net.p1, net.p2);
            cfg.n = 2;
            cfg.edges = g.edges();
        } catch (const InvalidArgument& e) {
            throw ConfigError("community", e.what());
        }
        cfg.community = net;
        cfg.gamma = {net.gamma, 1.0 / net.gamma};
        if (j.contains("graph") || j.contains("bias")) {
            throw ConfigError("community", "cannot be combined with graph or bias");
        }
    } else {
        if (!j.contains("graph")) throw ConfigError("graph", "missing (or give a community block)");
        const auto& gj = j.at("graph");
        if (gj.is_string()) {
            const std::filesystem::path p = base_dir / gj.get<std::string>();
            detail::parse_graph_object(detail::read_json_file(p, "graph"), cfg, "graph.");
        } else if (gj.is_object()) {
            detail::parse_graph_object(gj, cfg, "graph.");
        } else {
            throw ConfigError("graph", "must be an object {n, edges} or a file path");
        }

        if (!j.contains("bias")) throw ConfigError("bias", "missing");
        const auto& bj = j.at("bias");
        if (bj.contains("gamma")) {
            cfg.gamma = get_field<std::vector<double>>(bj, "gamma", "bias.");
        } else if (bj.contains("phi_honesty")) {
            const auto pairs = get_field<std::vector<std::pair<int, double>>>(bj, "phi_honesty", "bias.");
            std::vector<int> phi;
            std::vector<double> honesty;
            for (const auto& [p, h] : pairs) {
                phi.push_back(p);
                honesty.push_back(h);
            }
            try {
                const auto profile = BiasProfile::from_beliefs(phi, honesty);
                cfg.gamma.assign(profile.gamma().begin(), profile.gamma().end());
            } catch (const InvalidArgument& e) {
                throw ConfigError("bias.phi_honesty", e.what());
            }
        } else {
            throw ConfigError("bias", "needs gamma or phi_honesty");
        }
    }
    if (cfg.gamma.size() != cfg.n) {
        throw ConfigError("bias", "has " + std::to_string(cfg.gamma.size()) + " entries for " +
                                      std::to_string(cfg.n) + " agents");
    }
    for (double g : cfg.gamma) {
        if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("bias", "every gamma must be positive and finite");
    }

    if (!j.contains("init") || j.at("init").is_number()) {
        const double b = get_or<double>(j, "init", 0.5, "");
        cfg.b1.assign(cfg.n, b);
    } else {
        cfg.b1 = get_field<std::vector<double>>(j, "init", "");
        if (cfg.b1.size() != cfg.n) throw ConfigError("init", "length does not match agent count");
    }
    for (double b : cfg.b1) {
        if (!(b > 0.0 && b < 1.0)) throw ConfigError("init", "every b1 must lie strictly inside (0, 1)");
    }

    cfg.steps = get_or<std::uint64_t>(j, "steps", cfg.steps, "");
    if (j.contains("seed")) cfg.seed = get_field<std::uint64_t>(j, "seed", "");
    cfg.stride = get_or<std::uint64_t>(j, "stride", cfg.stride, "");
    cfg.runs = get_or<std::size_t>(j, "runs", cfg.runs, "");
    if (cfg.steps < 1) throw ConfigError("steps", "must be >= 1");
    if (cfg.stride < 1) throw ConfigError("stride", "must be >= 1");
    if (cfg.runs < 1) throw ConfigError("runs", "must be >= 1");

    if (j.contains("options")) {
        const auto& o = j.at("options");
        auto& opt = cfg.options;
        opt.tol = get_or(o, "tol", opt.tol, "options.");
        opt.max_iter = get_or(o, "max_iter", opt.max_iter, "options.");
        opt.damping = get_or(o, "damping", opt.damping, "options.");
        opt.eps_lambda = get_or(o, "eps_lambda", opt.eps_lambda, "options.");
        opt.eps_degenerate = get_or(o, "eps_degenerate", opt.eps_degenerate, "options.");
        if (o.contains("window")) opt.window = get_field<std::size_t>(o, "window", "options.");
        opt.samples = get_or(o, "samples", opt.samples, "options.");
        if (!(opt.tol > 0.0)) throw ConfigError("options.tol", "must be positive");
        if (!(opt.damping > 0.0 && opt.damping <= 1.0)) throw ConfigError("options.damping", "must lie in (0, 1]");
        if (opt.window && *opt.window == 0) throw ConfigError("options.window", "must be >= 1");
    }
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    return parse_config(detail::read_json_file(path, "config"), path.parent_path());
}

/// Config echo: re-parses to an equal RunConfig.
inline nlohmann::json to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    if (cfg.community) {
        j["community"] = {{"gamma", cfg.community->gamma}, {"p1", cfg.community->p1}, {"p2", cfg.community->p2}};
    } else {
        nlohmann::json edges = nlohmann::json::array();
        for (const Edge& e : cfg.edges) edges.push_back({e.i, e.j, e.weight});
        j["graph"] = {{"n", cfg.n}, {"edges", edges}};
        j["bias"] = {{"gamma", cfg.gamma}};
    }
    j["init"] = cfg.b1;
    j["steps"] = cfg.steps;
    if (cfg.seed) j["seed"] = *cfg.seed;
    j["stride"] = cfg.stride;
    j["runs"] = cfg.runs;
    nlohmann::json o = {{"tol", cfg.options.tol},
                        {"max_iter", cfg.options.max_iter},
                        {"damping", cfg.options.damping},
                        {"eps_lambda", cfg.options.eps_lambda},
                        {"eps_degenerate", cfg.options.eps_degenerate},
                        {"samples", cfg.options.samples}};
    if (cfg.options.window) o["window"] = *cfg.options.window;
    j["options"] = o;
    return j;
}

}  // namespace polya
