#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "polya/equilibrium.hpp"
#include "polya/jacobian.hpp"

namespace polya {

enum class Verdict { AllZeros, AllOnes, NoConsensus };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::AllZeros: return "AllZeros";
        case Verdict::AllOnes: return "AllOnes";
        case Verdict::NoConsensus: return "NoConsensus";
    }
    return "?";
}

inline const char* to_string(Stability s) {
    switch (s) {
        case Stability::Unknown: return "Unknown";
        case Stability::Stable: return "Stable";
        case Stability::Unstable: return "Unstable";
        case Stability::Marginal: return "Marginal";
    }
    return "?";
}

inline const char* to_string(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::AllZeros: return "AllZeros";
        case EquilibriumKind::AllOnes: return "AllOnes";
        case EquilibriumKind::Interior: return "Interior";
    }
    return "?";
}

struct ConsensusClassification {
    double lambda0 = 0.0;  // lambda_max(Gamma W), Jacobian at the all-zeros point
    double lambda1 = 0.0;  // lambda_max(Gamma^-1 W), Jacobian at the all-ones point
    Verdict verdict = Verdict::NoConsensus;
    bool marginal = false;  // some |lambda - 1| < eps
};

inline constexpr double kDefaultEpsLambda = 1e-9;

/// Boundary consensus test. A boundary point x attracts almost surely iff
/// lambda_max(S_x) <= 1; at most one boundary point can satisfy this on a
/// connected non-bipartite graph with Gamma != I, so both doing so within
/// eps_lambda raises NumericalError.
inline ConsensusClassification classify_consensus(const Graph& g, const BiasProfile& bias,
                                                  double eps_lambda = kDefaultEpsLambda,
                                                  const PowerIterationOptions& opts = {}) {
    if (bias.size() != g.size()) throw InvalidArgument("bias profile size does not match graph");
    if (bias.is_identity()) {
        throw ValidationError("Gamma = I: consensus classification assumes Gamma != I");
    }
    const auto n = static_cast<Eigen::Index>(g.size());

    ConsensusClassification c;
    c.lambda0 = lambda_max(jacobian(Vector::Zero(n), g, bias), opts);
    c.lambda1 = lambda_max(jacobian(Vector::Ones(n), g, bias), opts);
    c.marginal = std::abs(c.lambda0 - 1.0) < eps_lambda || std::abs(c.lambda1 - 1.0) < eps_lambda;

    const bool zeros_attract = c.lambda0 <= 1.0 + eps_lambda;
    const bool ones_attract = c.lambda1 <= 1.0 + eps_lambda;
    if (zeros_attract && ones_attract) {
        throw NumericalError("both boundary Jacobians have lambda_max <= 1 (lambda0 = " +
                                 std::to_string(c.lambda0) + ", lambda1 = " + std::to_string(c.lambda1) +
                                 "); check that the graph is connected and not bipartite",
                             std::max(c.lambda0, c.lambda1));
    }
    c.verdict = ones_attract ? Verdict::AllOnes
              : zeros_attract ? Verdict::AllZeros
                              : Verdict::NoConsensus;
    return c;
}

/// Local stability of an interior equilibrium: Stable when lambda_max(S_x) < 1 - eps,
/// Unstable when > 1 + eps, Marginal in between.
inline Stability classify_interior(const Equilibrium& eq, const Graph& g, const BiasProfile& bias,
                                   double eps_lambda = kDefaultEpsLambda,
                                   const PowerIterationOptions& opts = {}) {
    if (eq.kind != EquilibriumKind::Interior ||
        !((eq.beta.array() > 0.0).all() && (eq.beta.array() < 1.0).all())) {
        throw InvalidArgument("classify_interior needs an interior equilibrium");
    }
    const double gap = fixed_point_gap(eq.beta, g, bias);
    if (!(gap < 1e-10)) {
        throw InvalidArgument("point is not an equilibrium: ||F(beta) - beta|| = " + std::to_string(gap));
    }
    const double lambda = lambda_max(jacobian(eq.beta, g, bias), opts);
    if (lambda < 1.0 - eps_lambda) return Stability::Stable;
    if (lambda > 1.0 + eps_lambda) return Stability::Unstable;
    return Stability::Marginal;
}

/// Central differences of the expected map against diag(c) W. Returns
/// max_ij |fd_ij - S_ij| / max_ij |S_ij|.
inline double jacobian_finite_difference_check(const Vector& x, const Graph& g,
                                               const BiasProfile& bias, double h) {
    if (!(h >= 1e-7 && h <= 1e-4)) throw InvalidArgument("finite-difference step must lie in [1e-7, 1e-4]");
    if (!((x.array() - h > 0.0).all() && (x.array() + h < 1.0).all())) {
        throw InvalidArgument("finite-difference point must be interior by at least h");
    }
    const Matrix analytic = jacobian(x, g, bias).dense();
    Matrix numeric(analytic.rows(), analytic.cols());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        Vector up = x;
        Vector down = x;
        up[j] += h;
        down[j] -= h;
        numeric.col(j) = (expected_map(up, g, bias) - expected_map(down, g, bias)) / (2.0 * h);
    }
    const double scale = analytic.cwiseAbs().maxCoeff();
    return (numeric - analytic).cwiseAbs().maxCoeff() / scale;
}

}  // namespace polya
