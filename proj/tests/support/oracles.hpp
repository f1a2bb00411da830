#pragma once

// Independent reference computations for the test suite. Nothing here calls
// into the library's numerical code paths.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "polya/graph.hpp"

namespace oracle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// f rearranged as 1 / (1 + (1 - mu) / (gamma mu)).
inline double f(double mu, double gamma) {
    if (mu == 0.0) return 0.0;
    return 1.0 / (1.0 + (1.0 - mu) / (gamma * mu));
}

// Integral of nu / (gamma - (gamma - 1) nu) over [0, mu] by adaptive Gauss-Kronrod.
inline double H(double mu, double gamma) {
    if (mu == 0.0) return 0.0;
    const auto integrand = [gamma](double nu) { return nu / (gamma - (gamma - 1.0) * nu); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, mu, 12, 1e-14);
}

inline Matrix walk(const Matrix& a) {
    const Vector deg = a.rowwise().sum();
    return deg.cwiseInverse().asDiagonal() * a;
}

inline std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
    Eigen::EigenSolver<Matrix> solver(m, false);
    const auto ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

inline double max_real_eigenvalue(const Matrix& m) {
    double best = -1e300;
    for (const auto& z : eigenvalues(m)) best = std::max(best, z.real());
    return best;
}

inline double max_imag_part(const Matrix& m) {
    double worst = 0.0;
    for (const auto& z : eigenvalues(m)) worst = std::max(worst, std::abs(z.imag()));
    return worst;
}

// Larger eigenvalue of diag(gamma, 1/gamma) [[p1, 1-p1], [1-p2, p2]] from the 2x2 characteristic polynomial.
inline double lambda_plus(double gamma, double p1, double p2) {
    const double half_trace = 0.5 * (gamma * p1 + p2 / gamma);
    return half_trace + std::sqrt(half_trace * half_trace + 1.0 - p1 - p2);
}

// Random connected, non-bipartite weighted graph: random spanning tree, extra
// edges with probability `density`, and a triangle on agents 1-2-3 (a
// self-loop on agent 1 when n < 3).
template <class Gen>
std::vector<polya::Edge> random_edges(std::size_t n, Gen& gen, double density = 0.3) {
    std::uniform_real_distribution<double> weight(0.1, 2.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<polya::Edge> edges;
    const auto add = [&](std::size_t i, std::size_t j) {
        const auto key = std::minmax(i, j);
        if (seen.insert(key).second) edges.push_back({key.first, key.second, weight(gen)});
    };
    for (std::size_t v = 2; v <= n; ++v) {
        std::uniform_int_distribution<std::size_t> parent(1, v - 1);
        add(parent(gen), v);
    }
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = i + 1; j <= n; ++j) {
            if (coin(gen) < density) add(i, j);
        }
    }
    if (n >= 3) {
        add(1, 2);
        add(2, 3);
        add(1, 3);
    } else {
        add(1, 1);
        if (n == 2) add(1, 2);
    }
    return edges;
}

template <class Gen>
polya::Graph random_graph(std::size_t n, Gen& gen, double density = 0.3) {
    return polya::build_graph(n, random_edges(n, gen, density));
}

// Log-uniform biases in [1/spread, spread], nudged so that not all are 1.
template <class Gen>
Vector random_gamma(std::size_t n, Gen& gen, double spread = 4.0) {
    std::uniform_real_distribution<double> u(-std::log(spread), std::log(spread));
    Vector g(static_cast<Eigen::Index>(n));
    for (auto& x : g) x = std::exp(u(gen));
    if ((g.array() == 1.0).all()) g[0] = 2.0;
    return g;
}

// Interior fixed points of the two-agent community network by a root scan.
// Agent a's stationarity pins mu_a = beta_a / (gamma - (gamma - 1) beta_a), hence
// beta_b; the remaining scalar equation is agent b's, solved by bisection in
// long double on every sign change of a fine grid.
inline std::vector<Vector> community_interior_roots(double gamma, double p1, double p2) {
    using ld = long double;
    const ld g = gamma;
    const auto beta_b_of = [&](ld ba) {
        const ld mu_a = ba / (g - (g - 1) * ba);
        return (mu_a - ld(p1) * ba) / (1 - ld(p1));
    };
    const auto r = [&](ld ba) {
        const ld bb = beta_b_of(ba);
        const ld mu_b = (1 - ld(p2)) * ba + ld(p2) * bb;
        const ld target = mu_b / (mu_b + g * (1 - mu_b));  // f(mu_b, 1/gamma)
        return target - bb;
    };
    std::vector<Vector> roots;
    constexpr int kGrid = 4000;
    for (int k = 1; k < kGrid - 1; ++k) {
        ld lo = ld(k) / kGrid;
        ld hi = ld(k + 1) / kGrid;
        ld rlo = r(lo);
        if ((rlo > 0) == (r(hi) > 0)) continue;
        for (int it = 0; it < 200; ++it) {
            const ld mid = 0.5L * (lo + hi);
            if ((r(mid) > 0) == (rlo > 0)) {
                lo = mid;
                rlo = r(mid);
            } else {
                hi = mid;
            }
        }
        const ld ba = 0.5L * (lo + hi);
        const ld bb = beta_b_of(ba);
        if (bb > 1e-9L && bb < 1 - 1e-9L) {
            Vector v(2);
            v << double(ba), double(bb);
            roots.push_back(v);
        }
    }
    return roots;
}

// Complete graph with every self-loop, unit weights: W = J / n.
inline std::vector<polya::Edge> complete_with_loops(std::size_t n) {
    std::vector<polya::Edge> e;
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = i; j <= n; ++j) e.push_back({i, j, 1.0});
    return e;
}

inline std::vector<polya::Edge> complete_without_loops(std::size_t n) {
    std::vector<polya::Edge> e;
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j) e.push_back({i, j, 1.0});
    return e;
}

}  // namespace oracle
