#pragma once

// Gauss rules from the Golub-Welsch eigenvalue problem.

#include <cmath>
#include <numbers>
#include <vector>

#include "tsqmc/errors.hpp"
#include "tsqmc/jacobi.hpp"

namespace tsqmc {

/// Nodes (ascending) and weights summing to one: an expectation, not an integral.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
};

enum class QuadratureKind { uniform01, gaussian };

namespace detail {

inline QuadratureRule golub_welsch(std::size_t n, const std::vector<double>& off_diag, double shift, double scale) {
    Matrix j(n, n);
    for (std::size_t i = 0; i + 1 < n; ++i) j(i, i + 1) = j(i + 1, i) = off_diag[i];
    const auto eig = jacobi_eigen(j, 1e-14, 200);
    QuadratureRule rule;
    for (std::size_t c = n; c-- > 0;) {
        rule.nodes.push_back(shift + scale * eig.values[c]);
        rule.weights.push_back(eig.vectors(0, c) * eig.vectors(0, c));
    }
    return rule;
}

}  // namespace detail

/// n-point Gauss-Legendre rule for the uniform distribution on [0,1].
inline QuadratureRule gauss_legendre01(std::size_t n) {
    if (n == 0) throw InvalidArgument("quadrature: need at least one node");
    std::vector<double> b(n > 0 ? n - 1 : 0);
    for (std::size_t k = 1; k < n; ++k) {
        const double kd = static_cast<double>(k);
        b[k - 1] = kd / std::sqrt(4.0 * kd * kd - 1.0);
    }
    return detail::golub_welsch(n, b, 0.5, 0.5);
}

/// n-point Gauss-Hermite rule for the standard normal distribution.
inline QuadratureRule gauss_hermite_normal(std::size_t n) {
    if (n == 0) throw InvalidArgument("quadrature: need at least one node");
    std::vector<double> b(n > 0 ? n - 1 : 0);
    for (std::size_t k = 1; k < n; ++k) b[k - 1] = std::sqrt(static_cast<double>(k));
    return detail::golub_welsch(n, b, 0.0, 1.0);
}

inline QuadratureRule make_rule(QuadratureKind kind, std::size_t n) {
    return kind == QuadratureKind::uniform01 ? gauss_legendre01(n) : gauss_hermite_normal(n);
}

}  // namespace tsqmc
