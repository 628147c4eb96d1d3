#pragma once

// Vertices of D = { z in R^r : W^T z <= q } for small r, by solving every
// r-subset of the m inequality rows.

#include <algorithm>
#include <cmath>
#include <iterator>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsqmc/errors.hpp"
#include "tsqmc/linalg.hpp"

namespace tsqmc {

inline constexpr std::size_t kMaxVertexDimension = 12;

struct VertexList {
    std::vector<std::vector<double>> vertices;
    std::vector<std::vector<std::size_t>> active;  // tight inequality rows (columns of W) per vertex

    [[nodiscard]] std::size_t size() const noexcept { return vertices.size(); }
    [[nodiscard]] bool empty() const noexcept { return vertices.empty(); }
};

struct VertexTolerances {
    double feasibility = 1e-9;
    double dedup = 1e-9;
    double singular = 1e-12;
};

namespace detail {

template <class Fn>
void for_each_subset(std::size_t m, std::size_t r, Fn&& fn) {
    std::vector<std::size_t> idx(r);
    for (std::size_t i = 0; i < r; ++i) idx[i] = i;
    if (r > m) return;
    for (;;) {
        fn(idx);
        std::size_t i = r;
        while (i > 0 && idx[i - 1] == m - r + (i - 1)) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
    }
}

inline double row_slack(const Matrix& w, std::span<const double> q, std::span<const double> z, std::size_t col) {
    double s = q[col];
    for (std::size_t i = 0; i < w.rows(); ++i) s -= w(i, col) * z[i];
    return s;
}

}  // namespace detail

/// W is r x m (one column per inequality), q has m entries. Throws when r
/// exceeds kMaxVertexDimension or when D has no vertex.
inline VertexList enumerate_vertices(const Matrix& w, std::span<const double> q, const VertexTolerances& tol = {}) {
    const std::size_t r = w.rows(), m = w.cols();
    if (q.size() != m) throw InvalidArgument("enumerate_vertices: q must have one entry per column of W");
    if (r == 0) throw InvalidArgument("enumerate_vertices: W has no rows");
    if (r > kMaxVertexDimension)
        throw InvalidArgument("enumerate_vertices: dimension " + std::to_string(r) + " exceeds the limit of " +
                              std::to_string(kMaxVertexDimension));
    VertexList out;
    Matrix sub(r, r);
    std::vector<double> rhs(r);
    detail::for_each_subset(m, r, [&](const std::vector<std::size_t>& idx) {
        // rows of the system are the chosen inequalities: W_{.,c}^T z = q_c
        for (std::size_t k = 0; k < r; ++k) {
            for (std::size_t i = 0; i < r; ++i) sub(k, i) = w(i, idx[k]);
            rhs[k] = q[idx[k]];
        }
        LuDecomposition lu(sub, tol.singular);
        if (lu.singular()) return;
        auto z = lu.solve(rhs);
        for (double& c : z) c += 0.0;  // no negative zeros in reports
        for (std::size_t c = 0; c < m; ++c)
            if (detail::row_slack(w, q, z, c) < -tol.feasibility * (1.0 + std::abs(q[c]))) return;
        for (const auto& v : out.vertices) {
            double d = 0.0;
            for (std::size_t i = 0; i < r; ++i) d = std::max(d, std::abs(v[i] - z[i]));
            if (d <= tol.dedup) return;
        }
        std::vector<std::size_t> act;
        for (std::size_t c = 0; c < m; ++c)
            if (std::abs(detail::row_slack(w, q, z, c)) <= tol.feasibility * (1.0 + std::abs(q[c]))) act.push_back(c);
        out.vertices.push_back(z);
        out.active.push_back(std::move(act));
    });
    if (out.empty()) throw InvalidArgument("enumerate_vertices: the dual feasible set has no vertex (empty or unpointed)");
    return out;
}

/// Pairs (i, j), i < j, joined by an edge of D: the common tight rows have
/// rank r - 1.
inline std::vector<std::pair<std::size_t, std::size_t>> vertex_adjacency(const VertexList& vl, const Matrix& w) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    const std::size_t r = w.rows();
    for (std::size_t i = 0; i < vl.size(); ++i)
        for (std::size_t j = i + 1; j < vl.size(); ++j) {
            std::vector<std::size_t> common;
            std::set_intersection(vl.active[i].begin(), vl.active[i].end(), vl.active[j].begin(), vl.active[j].end(),
                                  std::back_inserter(common));
            if (common.size() < r - 1) continue;
            Matrix g(common.size(), r);
            for (std::size_t k = 0; k < common.size(); ++k)
                for (std::size_t c = 0; c < r; ++c) g(k, c) = w(c, common[k]);
            if (matrix_rank(g) == r - 1) pairs.emplace_back(i, j);
        }
    return pairs;
}

}  // namespace tsqmc
