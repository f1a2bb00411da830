#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "polya/dynamics.hpp"

namespace polya {

/// H(mu, gamma) = integral_0^mu f^-1(nu, gamma) d nu, with f^-1(nu, gamma) = nu / (gamma - (gamma - 1) nu).
///
/// Closed form for gamma != 1, with k = gamma - 1 and x = k mu / gamma:
///     H = -mu / k - (gamma / k^2) log(1 - x).
/// The two terms cancel to O(mu^2) as k -> 0, so for |x| < 0.1 the series
///     H = (mu^2 / gamma) sum_{m >= 2} x^(m-2) / m
/// is used instead; it reduces to mu^2 / 2 at gamma = 1.
inline double antiderivative_H(double mu, double gamma) {
    detail::require_probability(mu, "mu");
    detail::require_gamma(gamma);
    const double k = gamma - 1.0;
    const double x = k * mu / gamma;
    if (std::abs(x) < 0.1) {
        double sum = 0.0;
        double power = 1.0;
        for (int m = 2; m < 40; ++m) {
            const double term = power / m;
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
            power *= x;
        }
        return mu * mu / gamma * sum;
    }
    return -mu / k - gamma / (k * k) * std::log1p(-x);
}

/// Additive constant in V: half the total edge weight, which keeps V >= 0 on
/// the unit cube (H >= 0 and beta^T A beta / 2 <= sum a_ij / 2).
inline double lyapunov_offset(const Graph& g) { return 0.5 * g.weights().sum(); }

/// V(beta) = sum_ij a_ij (H(beta_i, gamma_i) - beta_i beta_j / 2) + C.
inline double value_V(const Vector& beta, const Graph& g, const BiasProfile& bias) {
    detail::require_size(beta, g.size(), "beta");
    detail::require_unit_cube(beta, "beta");
    double h_part = 0.0;
    for (Eigen::Index i = 0; i < beta.size(); ++i) {
        h_part += g.degrees()[i] * antiderivative_H(beta[i], bias.gamma()[i]);
    }
    return h_part - 0.5 * beta.dot(g.weights() * beta) + lyapunov_offset(g);
}

/// dV/dbeta_i = deg_i (f^-1(beta_i, gamma_i) - mu_i). Uses the symmetry of A.
inline Vector gradient_V(const Vector& beta, const Graph& g, const BiasProfile& bias) {
    detail::require_size(beta, g.size(), "beta");
    detail::require_unit_cube(beta, "beta");
    const Vector mu = g.walk() * beta;
    Vector grad(beta.size());
    for (Eigen::Index i = 0; i < beta.size(); ++i) {
        grad[i] = g.degrees()[i] * (detail::conform(beta[i], 1.0 / bias.gamma()[i]) - mu[i]);
    }
    return grad;
}

/// <F(beta) - beta, grad V(beta)>. Summed from the per-agent products
/// deg_i (f^-1(beta_i) - mu_i)(f(mu_i) - beta_i), each of which is <= 0.
inline double descent(const Vector& beta, const Graph& g, const BiasProfile& bias) {
    detail::require_size(beta, g.size(), "beta");
    detail::require_unit_cube(beta, "beta");
    const Vector mu = g.walk() * beta;
    double total = 0.0;
    for (Eigen::Index i = 0; i < beta.size(); ++i) {
        const double gamma = bias.gamma()[i];
        total += g.degrees()[i] * (detail::conform(beta[i], 1.0 / gamma) - mu[i]) *
                 (detail::conform(mu[i], gamma) - beta[i]);
    }
    return total;
}

/// Largest per-agent sign product (f^-1(beta_i) - mu_i)(f(mu_i) - beta_i); never positive
/// beyond rounding.
inline double worst_sign_product(const Vector& beta, const Graph& g, const BiasProfile& bias) {
    const Vector mu = g.walk() * beta;
    double worst = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < beta.size(); ++i) {
        const double gamma = bias.gamma()[i];
        worst = std::max(worst, (detail::conform(beta[i], 1.0 / gamma) - mu[i]) *
                                    (detail::conform(mu[i], gamma) - beta[i]));
    }
    return worst;
}

struct LyapunovValue {
    double value = 0.0;
    Vector gradient;
    double descent = 0.0;
};

inline LyapunovValue evaluate_lyapunov(const Vector& beta, const Graph& g, const BiasProfile& bias) {
    return {value_V(beta, g, bias), gradient_V(beta, g, bias), descent(beta, g, bias)};
}

}  // namespace polya
