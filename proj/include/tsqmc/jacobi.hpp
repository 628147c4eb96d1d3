#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "tsqmc/errors.hpp"
#include "tsqmc/linalg.hpp"

namespace tsqmc {

struct SymmetricEigen {
    std::vector<double> values;  // descending
    Matrix vectors;              // column i belongs to values[i]
};

/// Cyclic Jacobi eigensolver for a symmetric matrix. Sweeps continue until
/// the off-diagonal Frobenius norm is at most `rel_tol` times the Frobenius
/// norm of the input. Eigenvectors are normalised so that their entry of
/// largest magnitude is positive, which makes the output reproducible.
inline SymmetricEigen jacobi_eigen(Matrix a, double rel_tol = 1e-12, int max_sweeps = 100) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw InvalidArgument("jacobi_eigen: matrix must be square");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(a(i, j) - a(j, i)) > 1e-12 * std::max(1.0, a.max_abs()))
                throw InvalidArgument("jacobi_eigen: matrix is not symmetric");

    double total = 0.0;
    for (double v : a.data()) total += v * v;
    const double target = rel_tol * std::sqrt(total);
    Matrix v = Matrix::identity(n);

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    int sweep = 0;
    while (off_norm() > target) {
        if (++sweep > max_sweeps) throw Error("jacobi_eigen: no convergence");
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                if (std::abs(apq) < 1e-18 * (std::abs(a(p, p)) + std::abs(a(q, q)))) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
    SymmetricEigen out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t src = order[c];
        out.values[c] = a(src, src);
        // Largest-magnitude entry, first index among near ties: Toeplitz
        // eigenvectors are (anti)symmetric, so |v_k| = |v_{n-1-k}| up to rounding.
        double peak = 0.0;
        for (std::size_t k = 0; k < n; ++k) peak = std::max(peak, std::abs(v(k, src)));
        std::size_t big = 0;
        while (std::abs(v(big, src)) < peak * (1.0 - 1e-9)) ++big;
        const double sign = v(big, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, c) = sign * v(k, src);
    }
    return out;
}

} // namespace tsqmc
