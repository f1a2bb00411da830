#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "polya/error.hpp"

namespace polya {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Undirected weighted edge with 1-based endpoints; i == j is a self-loop.
struct Edge {
    std::size_t i;
    std::size_t j;
    double weight;
};

/// Weighted undirected network. Immutable once built; the random-walk matrix
/// W = D^-1 A is cached when every degree is positive.
class Graph {
public:
    std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
    const Matrix& weights() const noexcept { return weights_; }
    const Vector& degrees() const noexcept { return degrees_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    bool has_self_loop() const noexcept { return has_self_loop_; }

    /// W = D^-1 A. Throws ValidationError naming the first isolated agent.
    const Matrix& walk() const {
        if (!walk_) {
            for (Eigen::Index i = 0; i < degrees_.size(); ++i) {
                if (!(degrees_[i] > 0.0)) {
                    throw ValidationError("agent " + std::to_string(i + 1) +
                                          " has zero degree; W = D^-1 A is undefined");
                }
            }
        }
        return *walk_;
    }

private:
    friend Graph build_graph(std::size_t n, const std::vector<Edge>& edges);

    Matrix weights_;
    Vector degrees_;
    std::optional<Matrix> walk_;
    std::vector<Edge> edges_;
    bool has_self_loop_ = false;
};

/// Builds A from an undirected edge list. (i, j) with i != j sets both a_ij
/// and a_ji; (i, i) sets the self-loop weight. Duplicates (in either
/// orientation), nonpositive or non-finite weights and out-of-range
/// endpoints are rejected with InvalidArgument.
inline Graph build_graph(std::size_t n, const std::vector<Edge>& edges) {
    if (n == 0) throw InvalidArgument("graph must have at least one agent");

    Graph g;
    g.weights_ = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::set<std::pair<std::size_t, std::size_t>> seen;

    for (const Edge& e : edges) {
        if (e.i < 1 || e.i > n || e.j < 1 || e.j > n) {
            throw InvalidArgument("edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                                  ") out of range 1.." + std::to_string(n));
        }
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            throw InvalidArgument("edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                                  ") has nonpositive or non-finite weight");
        }
        const auto key = std::minmax(e.i, e.j);
        if (!seen.insert(key).second) {
            throw InvalidArgument("duplicate edge (" + std::to_string(key.first) + ", " +
                                  std::to_string(key.second) + ")");
        }
        const auto i = static_cast<Eigen::Index>(e.i - 1);
        const auto j = static_cast<Eigen::Index>(e.j - 1);
        g.weights_(i, j) = e.weight;
        g.weights_(j, i) = e.weight;
        if (i == j) g.has_self_loop_ = true;
    }

    g.degrees_ = g.weights_.rowwise().sum();
    g.edges_ = edges;
    if ((g.degrees_.array() > 0.0).all()) {
        g.walk_ = g.degrees_.cwiseInverse().asDiagonal() * g.weights_;
    }
    return g;
}

/// Row-stochastic W = D^-1 A.
inline Matrix normalized_adjacency(const Graph& g) { return g.walk(); }

struct ValidationReport {
    bool connected = false;
    bool bipartite = false;
    double min_degree = 0.0;
    bool ok = false;
};

/// Connectivity by BFS over positive-weight edges, bipartiteness by
/// 2-colouring. A self-loop is an odd cycle, so it forces bipartite = false.
inline ValidationReport validate(const Graph& g) {
    const auto n = static_cast<Eigen::Index>(g.size());
    const Matrix& a = g.weights();

    ValidationReport report;
    report.min_degree = g.degrees().minCoeff();

    std::vector<int> colour(static_cast<std::size_t>(n), -1);
    bool odd_cycle = g.has_self_loop();
    int components = 0;
    std::queue<Eigen::Index> frontier;
    for (Eigen::Index s = 0; s < n; ++s) {
        if (colour[static_cast<std::size_t>(s)] >= 0) continue;
        ++components;
        colour[static_cast<std::size_t>(s)] = 0;
        frontier.push(s);
        while (!frontier.empty()) {
            const Eigen::Index u = frontier.front();
            frontier.pop();
            const int cu = colour[static_cast<std::size_t>(u)];
            for (Eigen::Index v = 0; v < n; ++v) {
                if (v == u || !(a(u, v) > 0.0)) continue;
                int& cv = colour[static_cast<std::size_t>(v)];
                if (cv < 0) {
                    cv = 1 - cu;
                    frontier.push(v);
                } else if (cv == cu) {
                    odd_cycle = true;
                }
            }
        }
    }

    report.connected = components == 1;
    report.bipartite = !odd_cycle;
    report.ok = report.connected && !report.bipartite && report.min_degree > 0.0;
    return report;
}

namespace detail {

inline void require_unit_cube(const Vector& x, const char* what) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x[i] >= 0.0 && x[i] <= 1.0)) {
            throw InvalidArgument(std::string(what) + " component " + std::to_string(i + 1) +
                                  " is outside [0, 1]");
        }
    }
}

inline void require_size(const Vector& x, std::size_t n, const char* what) {
    if (static_cast<std::size_t>(x.size()) != n) {
        throw InvalidArgument(std::string(what) + " has " + std::to_string(x.size()) +
                              " components, graph has " + std::to_string(n) + " agents");
    }
}

}  // namespace detail

/// mu = W x: the degree-weighted neighbourhood average of x.
inline Vector neighborhood_average(const Graph& g, const Vector& x) {
    detail::require_size(x, g.size(), "x");
    detail::require_unit_cube(x, "x");
    return g.walk() * x;
}

}  // namespace polya
