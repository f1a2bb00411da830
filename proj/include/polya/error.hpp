#pragma once

#include <stdexcept>
#include <string>

namespace polya {

// Input outside an operation's domain (bad edge, gamma <= 0, mu outside [0,1], ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The model's standing assumptions do not hold (disconnected or bipartite
// graph, Gamma == I). Callers may override where the operation allows it.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An iterative method did not reach its tolerance, or results contradict a
// structural guarantee (e.g. both boundary Jacobians have lambda_max <= 1).
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double best_estimate = 0.0, double residual = 0.0)
        : std::runtime_error(what), best_estimate_(best_estimate), residual_(residual) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double residual() const noexcept { return residual_; }

private:
    double best_estimate_;
    double residual_;
};

}  // namespace polya
