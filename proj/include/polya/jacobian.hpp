#pragma once

#include <cmath>
#include <cstdint>

#include "polya/dynamics.hpp"

namespace polya {

/// Jacobian of the expected map at a point x:  S_x = diag(c) W  with
/// c_i = gamma_i / (1 + (gamma_i - 1) mu_i)^2 and mu = W x.
/// Holds a pointer to the graph, which must outlive the operator.
struct JacobianOperator {
    Vector scale;
    Vector point;
    const Graph* graph = nullptr;

    /// Dense diag(c) W.
    Matrix dense() const { return scale.asDiagonal() * graph->walk(); }
};

inline JacobianOperator jacobian(const Vector& x, const Graph& g, const BiasProfile& bias) {
    detail::require_size(x, g.size(), "x");
    detail::require_unit_cube(x, "x");
    if (bias.size() != g.size()) throw InvalidArgument("bias profile size does not match graph");

    const bool at_zero = (x.array() == 0.0).all();
    const bool at_one = (x.array() == 1.0).all();

    JacobianOperator op;
    op.point = x;
    op.graph = &g;
    op.scale.resize(x.size());
    // Exact boundary points give c = gamma and c = 1/gamma without rounding from W 1.
    const Vector mu = (at_zero || at_one) ? Vector() : Vector(g.walk() * x);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double gamma = bias.gamma()[i];
        if (at_zero) {
            op.scale[i] = gamma;
        } else if (at_one) {
            op.scale[i] = 1.0 / gamma;
        } else {
            const double denom = 1.0 + (gamma - 1.0) * mu[i];
            op.scale[i] = gamma / (denom * denom);
        }
    }
    return op;
}

/// B^{1/2} A B^{1/2} with B = diag(c_i / deg_i): symmetric and similar to
/// diag(c) W, so it carries the same (real) spectrum.
inline Matrix symmetric_similar(const JacobianOperator& op) {
    const Graph& g = *op.graph;
    const Vector root = (op.scale.array() / g.degrees().array()).sqrt();
    const Matrix m = root.asDiagonal() * g.weights() * root.asDiagonal();
    return 0.5 * (m + m.transpose());
}

struct PowerIterationOptions {
    double tol = 1e-12;
    std::uint64_t max_iter = 1'000'000;
};

/// Largest eigenvalue of a symmetric matrix with a nonnegative irreducible
/// pattern, by power iteration from the normalised all-ones vector. Iterates
/// on M + sI with s = half the largest absolute row sum: the spectrum of M lies
/// in [-lambda_max, lambda_max], and the shift keeps an eigenvalue near
/// -lambda_max (nearly bipartite graphs) from stalling convergence.
/// Stops when successive Rayleigh quotients differ by less than `tol`.
inline double perron_root(const Matrix& m, const PowerIterationOptions& opts = {}) {
    const Eigen::Index n = m.rows();
    const double shift = 0.5 * m.cwiseAbs().rowwise().sum().maxCoeff();
    Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
    Vector mv = m * v + shift * v;
    double lambda = v.dot(mv);
    for (std::uint64_t it = 0; it < opts.max_iter; ++it) {
        const double norm = mv.norm();
        if (norm == 0.0) return 0.0;
        v = mv / norm;
        mv.noalias() = m * v;
        mv += shift * v;
        const double next = v.dot(mv);
        if (std::abs(next - lambda) < opts.tol) return std::max(next - shift, 0.0);
        lambda = next;
    }
    const double residual = (mv - lambda * v).norm();
    throw NumericalError("power iteration hit its iteration cap", lambda - shift, residual);
}

/// lambda_max(S_x), computed on the symmetric similar matrix.
inline double lambda_max(const JacobianOperator& op, const PowerIterationOptions& opts = {}) {
    return perron_root(symmetric_similar(op), opts);
}

}  // namespace polya
