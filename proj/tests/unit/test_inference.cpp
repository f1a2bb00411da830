#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "polya/equilibrium.hpp"
#include "polya/inference.hpp"

using namespace polya;

TEST(Estimators, HandValues) {
    EXPECT_NEAR(*estimate_bias(0.4, 0.4), 1.0, 1e-15);
    EXPECT_NEAR(*estimate_bias(2.0 / 3.0, 0.5), 2.0, 1e-14);
    EXPECT_NEAR(*estimate_bias(0.8, 0.5), 4.0, 1e-14);
    EXPECT_EQ(estimate_belief(2.0 / 3.0, 0.5), 1);
    EXPECT_NEAR(*estimate_bias(0.3, 0.5), 3.0 / 7.0, 1e-15);
    EXPECT_EQ(estimate_belief(0.3, 0.5), 0);
    EXPECT_FALSE(estimate_belief(0.4, 0.4).has_value());
}

TEST(Estimators, DegenerateRegime) {
    for (auto [b, m] : {std::pair{0.0, 0.3}, {1.0, 0.3}, {0.3, 0.0}, {0.3, 1.0}, {5e-7, 0.2}, {0.2, 1 - 5e-7}}) {
        const AgentEstimate e = estimate_agent(b, m);
        EXPECT_EQ(e.regime, Regime::ConsensusDegenerate);
        EXPECT_FALSE(e.gamma_hat.has_value());
        EXPECT_FALSE(e.phi_hat.has_value());
    }
    EXPECT_EQ(estimate_agent(0.5, 0.4).regime, Regime::Interior);
}

TEST(Estimators, InvertsConformingFunction) {
    for (int a = 1; a < 50; ++a) {
        const double mu = a / 50.0;
        for (int k = 0; k < 30; ++k) {
            const double gamma = std::pow(10.0, -1.5 + 3.0 * k / 29.0);
            const double beta = oracle::f(mu, gamma);
            if (beta < 1e-6 || beta > 1 - 1e-6) continue;
            EXPECT_NEAR(*estimate_bias(beta, mu), gamma, 1e-12 * std::max(1.0, gamma)) << mu << " " << gamma;
        }
    }
}

TEST(Estimators, CoherentAndMonotone) {
    for (int a = 1; a < 40; ++a) {
        for (int c = 1; c < 40; ++c) {
            const double beta = a / 40.0, mu = c / 40.0;
            const auto phi = estimate_belief(beta, mu);
            const double g = *estimate_bias(beta, mu);
            if (phi) EXPECT_EQ(*phi == 1, g > 1.0);
            if (a + 1 < 40) EXPECT_GT(*estimate_bias((a + 1) / 40.0, mu), g);
            if (c + 1 < 40) EXPECT_LT(*estimate_bias(beta, (c + 1) / 40.0), g);
        }
    }
}

TEST(InferAll, WindowChecksAndExactEquilibrium) {
    const Graph g = community_graph(0.75, 0.75);
    const BiasProfile b((Vector(2) << 2.0, 0.5).finished());
    const Vector star = *community_interior(2.0, 0.75, 0.75);
    const Trajectory tr = integrate_expected(g, b, star, 100);
    EXPECT_EQ(default_window(tr), 10u);
    const auto est = infer_all(tr, default_window(tr));
    ASSERT_EQ(est.size(), 2u);
    EXPECT_NEAR(*est[0].gamma_hat, 2.0, 1e-10);
    EXPECT_NEAR(*est[1].gamma_hat, 0.5, 1e-10);
    EXPECT_EQ(est[0].phi_hat, 1);
    EXPECT_EQ(est[1].phi_hat, 0);

    EXPECT_THROW(infer_all(tr, 101), InvalidArgument);
    EXPECT_THROW(infer_all(tr, 0), InvalidArgument);
}

TEST(InferAll, ConsensusFlowIsDegenerate) {
    // the deterministic flow started at all-zeros stays there
    const Graph g = community_graph(0.5, 0.7);
    const BiasProfile b((Vector(2) << 1.2, 1 / 1.2).finished());
    const Trajectory tr = integrate_expected(g, b, Vector::Zero(2), 50);
    for (const auto& e : infer_all(tr, 5)) EXPECT_EQ(e.regime, Regime::ConsensusDegenerate);
}
