#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "polya/graph.hpp"

using namespace polya;

namespace {

Graph triangle() { return build_graph(3, {{1, 2, 1.0}, {2, 3, 1.0}, {1, 3, 1.0}}); }

Graph community_075() { return build_graph(2, {{1, 1, 0.1875}, {2, 2, 0.1875}, {1, 2, 0.0625}}); }

}  // namespace

TEST(Graph, DegreesAreRowSums) {
    EXPECT_DOUBLE_EQ(community_075().degrees()[0], 0.25);
    EXPECT_DOUBLE_EQ(community_075().degrees()[1], 0.25);
    const Graph t = triangle();
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(t.degrees()[i], 2.0);
}

TEST(Graph, SingleEdgeBuildsButIsBipartite) {
    const Graph g = build_graph(2, {{1, 2, 1.0}});
    const ValidationReport v = validate(g);
    EXPECT_TRUE(v.connected);
    EXPECT_TRUE(v.bipartite);
    EXPECT_FALSE(v.ok);
}

TEST(Graph, RejectsBadEdges) {
    EXPECT_THROW(build_graph(2, {{1, 3, 1.0}}), InvalidArgument);
    EXPECT_THROW(build_graph(2, {{0, 1, 1.0}}), InvalidArgument);
    EXPECT_THROW(build_graph(2, {{1, 2, 0.0}}), InvalidArgument);
    EXPECT_THROW(build_graph(2, {{1, 2, -1.0}}), InvalidArgument);
    EXPECT_THROW(build_graph(2, {{1, 2, 1.0}, {2, 1, 1.0}}), InvalidArgument);
}

TEST(Graph, IsolatedAgentHasNoWalk) {
    const Graph g = build_graph(3, {{1, 2, 1.0}});
    EXPECT_THROW(g.walk(), ValidationError);
    EXPECT_FALSE(validate(g).ok);
}

TEST(Graph, WalkMatrices) {
    const Matrix w = triangle().walk();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(w(i, j), i == j ? 0.0 : 0.5);

    const Matrix c = community_075().walk();
    EXPECT_DOUBLE_EQ(c(0, 0), 0.75);
    EXPECT_DOUBLE_EQ(c(0, 1), 0.25);
    EXPECT_DOUBLE_EQ(c(1, 0), 0.25);
    EXPECT_DOUBLE_EQ(c(1, 1), 0.75);

    const Matrix k = build_graph(10, oracle::complete_without_loops(10)).walk();
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) EXPECT_NEAR(k(i, j), i == j ? 0.0 : 1.0 / 9.0, 1e-15);
}

TEST(Graph, Validation) {
    EXPECT_TRUE(validate(triangle()).ok);
    std::vector<Edge> two;
    for (std::size_t base : {0u, 3u}) {
        two.push_back({base + 1, base + 2, 1.0});
        two.push_back({base + 2, base + 3, 1.0});
        two.push_back({base + 1, base + 3, 1.0});
    }
    const ValidationReport v = validate(build_graph(6, two));
    EXPECT_FALSE(v.connected);
    EXPECT_FALSE(v.ok);

    // even cycle is bipartite
    EXPECT_TRUE(validate(build_graph(4, {{1, 2, 1}, {2, 3, 1}, {3, 4, 1}, {4, 1, 1}})).bipartite);
}

TEST(Graph, SelfLoopBreaksBipartiteness) {
    std::mt19937_64 gen(11);
    for (int rep = 0; rep < 50; ++rep) {
        // a path plus one random self-loop
        const std::size_t n = 2 + rep % 6;
        std::vector<Edge> edges;
        for (std::size_t i = 1; i < n; ++i) edges.push_back({i, i + 1, 1.0});
        const std::size_t v = 1 + gen() % n;
        edges.push_back({v, v, 0.5});
        EXPECT_FALSE(validate(build_graph(n, edges)).bipartite);
    }
}

TEST(Graph, NeighborhoodAverageExamples) {
    const Graph g = community_075();
    Vector x(2);
    x << 1.0, 0.0;
    const Vector mu = neighborhood_average(g, x);
    EXPECT_DOUBLE_EQ(mu[0], 0.75);
    EXPECT_DOUBLE_EQ(mu[1], 0.25);
    EXPECT_EQ(neighborhood_average(g, Vector::Zero(2)), Vector::Zero(2));
    EXPECT_NEAR((neighborhood_average(g, Vector::Ones(2)) - Vector::Ones(2)).norm(), 0.0, 1e-15);
}

TEST(Graph, RowStochasticAndLinear) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 1 + rep % 30;
        const Graph g = oracle::random_graph(n, gen);
        const auto size = static_cast<Eigen::Index>(n);
        EXPECT_LT((g.walk() * Vector::Ones(size) - Vector::Ones(size)).lpNorm<Eigen::Infinity>(), 1e-12);

        Vector x(size), y(size);
        for (auto& v : x) v = u(gen);
        for (auto& v : y) v = u(gen);
        const double a = u(gen), b = u(gen);
        // convex-ish combination keeps the argument inside the unit cube
        const double s = a + b;
        const Vector lhs = neighborhood_average(g, (a / s) * x + (b / s) * y);
        const Vector rhs = (a / s) * neighborhood_average(g, x) + (b / s) * neighborhood_average(g, y);
        EXPECT_LT((lhs - rhs).lpNorm<Eigen::Infinity>(), 1e-12);
    }
}

TEST(Graph, DegreeIdentityForComplementaryCounts) {
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 2 + rep % 12;
        const Graph g = oracle::random_graph(n, gen);
        Vector b1(static_cast<Eigen::Index>(n));
        for (auto& v : b1) v = u(gen);
        const Vector b0 = Vector::Ones(b1.size()) - b1;
        const Vector m = g.weights() * b0 + g.weights() * b1;
        EXPECT_LT((m - g.degrees()).lpNorm<Eigen::Infinity>(), 1e-12);
    }
}
