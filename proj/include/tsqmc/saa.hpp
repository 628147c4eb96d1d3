#pragma once

// Sample average approximation of a two-stage problem over n scenarios,
// either as one extensive-form LP or by single-cut L-shaped decomposition.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "tsqmc/errors.hpp"
#include "tsqmc/linalg.hpp"
#include "tsqmc/lp.hpp"
#include "tsqmc/parallel.hpp"
#include "tsqmc/recourse.hpp"

namespace tsqmc {

enum class SaaMethod { extensive, l_shaped };

inline std::string to_string(SaaMethod m) { return m == SaaMethod::extensive ? "extensive" : "l_shaped"; }

struct SaaSolution {
    std::vector<double> x;
    double value = 0.0;
    std::size_t iterations = 0;  // master solves for l_shaped, 1 for extensive
    double gap = 0.0;            // final upper minus lower bound (l_shaped)
};

struct LShapedOptions {
    double gap_tol = 1e-6;  // stop when UB - LB <= gap_tol * (1 + |UB|)
    std::size_t max_iterations = 500;
    std::size_t workers = 0;  // 0 means worker_count()
};

namespace detail {

inline void check_scenarios(const TwoStageProblem& p, const Matrix& scenarios) {
    if (scenarios.rows() == 0) throw InvalidArgument("SAA: no scenarios");
    if (scenarios.cols() != p.d())
        throw InvalidArgument("SAA: scenarios have dimension " + std::to_string(scenarios.cols()) + ", problem needs " +
                              std::to_string(p.d()));
}

/// Columns [0, nx) hold x and [nx, nx + g) the range slacks of G x, which
/// are shared by the extensive form and the L-shaped master.
inline LinearProgram first_stage_block(const TwoStageProblem& p, std::size_t extra_rows, std::size_t extra_cols) {
    const std::size_t nx = p.first_stage_dim(), ng = p.x_set.g.rows();
    LinearProgram lp;
    lp.a = Matrix(ng + extra_rows, nx + ng + extra_cols);
    lp.rhs.assign(lp.a.rows(), 0.0);
    lp.objective.assign(lp.a.cols(), 0.0);
    lp.lower.assign(lp.a.cols(), 0.0);
    lp.upper.assign(lp.a.cols(), kInf);
    for (std::size_t i = 0; i < nx; ++i) {
        lp.objective[i] = p.c[i];
        lp.lower[i] = p.x_set.lower[i];
        lp.upper[i] = p.x_set.upper[i];
    }
    for (std::size_t r = 0; r < ng; ++r) {
        for (std::size_t i = 0; i < nx; ++i) lp.a(r, i) = p.x_set.g(r, i);
        lp.a(r, nx + r) = -1.0;
        lp.lower[nx + r] = p.x_set.row_lower[r];
        lp.upper[nx + r] = p.x_set.row_upper[r];
    }
    return lp;
}

}  // namespace detail

/// Extensive form: x, the range slacks of X, then one y block per scenario
/// with recourse costs weighted 1/n. Rows: G x - u = 0, then
/// W y^j + T x = h(xi^j) for each scenario.
inline LinearProgram assemble_saa(const TwoStageProblem& p, const Matrix& scenarios) {
    p.validate();
    detail::check_scenarios(p, scenarios);
    const std::size_t n = scenarios.rows(), nx = p.first_stage_dim(), ng = p.x_set.g.rows();
    const std::size_t r = p.r(), ny = p.w.cols();
    LinearProgram lp = detail::first_stage_block(p, n * r, n * ny);
    const double weight = 1.0 / static_cast<double>(n);
    const std::vector<double> zero_x(nx, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t row0 = ng + j * r, col0 = nx + ng + j * ny;
        const auto h = recourse_rhs(p, zero_x, scenarios.row(j));
        for (std::size_t i = 0; i < r; ++i) {
            lp.rhs[row0 + i] = h[i];
            for (std::size_t k = 0; k < ny; ++k) lp.a(row0 + i, col0 + k) = p.w(i, k);
            for (std::size_t k = 0; k < nx; ++k) lp.a(row0 + i, k) = p.t(i, k);
        }
        for (std::size_t k = 0; k < ny; ++k) {
            lp.objective[col0 + k] = weight * p.q[k];
            lp.lower[col0 + k] = p.y_lower[k];
            lp.upper[col0 + k] = p.y_upper[k];
        }
    }
    return lp;
}

namespace detail {

inline SaaSolution solve_extensive(const TwoStageProblem& p, const Matrix& scenarios) {
    const auto lp = assemble_saa(p, scenarios);
    const auto sol = solve_lp(lp);
    if (sol.status == LpStatus::infeasible)
        throw RecourseInfeasible("SAA extensive form infeasible: X is empty or (A1) fails");
    if (sol.status != LpStatus::optimal) throw Error("SAA extensive form: " + to_string(sol.status));
    SaaSolution out;
    out.x.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(p.first_stage_dim()));
    out.value = sol.value;
    out.iterations = 1;
    return out;
}

struct Cut {
    std::vector<double> beta;  // theta + beta^T x >= alpha
    double alpha = 0.0;
};

inline SaaSolution solve_l_shaped(const TwoStageProblem& p, const Matrix& scenarios, const LShapedOptions& opt) {
    const std::size_t n = scenarios.rows(), nx = p.first_stage_dim(), ng = p.x_set.g.rows(), r = p.r();
    const std::size_t workers = opt.workers ? opt.workers : worker_count();
    std::vector<Cut> cuts;
    SaaSolution best;
    best.value = kInf;
    double lower_bound = -kInf;

    // The first iterate minimises c^T x over X alone.
    std::vector<double> x;
    {
        const auto lp = first_stage_block(p, 0, 0);
        const auto sol = solve_lp(lp);
        if (sol.status == LpStatus::infeasible) throw InvalidArgument("L-shaped: first-stage set X is empty");
        if (sol.status != LpStatus::optimal) throw Error("L-shaped: first-stage LP " + to_string(sol.status));
        x.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(nx));
    }

    std::vector<double> values(n);
    std::vector<std::vector<double>> duals(n);
    for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
        best.iterations = it;
        parallel_for(n, [&](std::size_t j) {
            const auto sol = solve_recourse(p, x, scenarios.row(j));
            values[j] = sol.value;
            duals[j] = sol.duals;
        }, workers);
        // Phi_j(x') >= Phi_j(x) + pi_j^T T (x - x'), averaged over scenarios
        Cut cut;
        cut.beta.assign(nx, 0.0);
        double recourse = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            recourse += values[j];
            for (std::size_t i = 0; i < r; ++i) {
                const double pi = duals[j][i];
                if (pi == 0.0) continue;
                const auto trow = p.t.row(i);
                for (std::size_t k = 0; k < nx; ++k) cut.beta[k] += pi * trow[k];
            }
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        recourse *= inv_n;
        for (double& b : cut.beta) b *= inv_n;
        cut.alpha = recourse + dot(cut.beta, x);

        const double upper = dot(p.c, x) + recourse;
        if (upper < best.value) {
            best.value = upper;
            best.x = x;
        }
        cuts.push_back(std::move(cut));
        best.gap = best.value - lower_bound;
        if (best.gap <= opt.gap_tol * (1.0 + std::abs(best.value))) return best;

        // master: first-stage block plus theta (free) and one surplus per cut
        const std::size_t nc = cuts.size();
        auto master = first_stage_block(p, nc, 1 + nc);
        const std::size_t theta = nx + ng;
        master.objective[theta] = 1.0;
        master.lower[theta] = -kInf;
        for (std::size_t k = 0; k < nc; ++k) {
            const std::size_t row = ng + k;
            for (std::size_t i = 0; i < nx; ++i) master.a(row, i) = cuts[k].beta[i];
            master.a(row, theta) = 1.0;
            master.a(row, theta + 1 + k) = -1.0;
            master.rhs[row] = cuts[k].alpha;
        }
        const auto ms = solve_lp(master);
        if (ms.status == LpStatus::unbounded)
            throw Error("L-shaped: master problem unbounded; X must be bounded");
        if (ms.status != LpStatus::optimal) throw Error("L-shaped: master problem " + to_string(ms.status));
        lower_bound = std::max(lower_bound, ms.value);
        x.assign(ms.x.begin(), ms.x.begin() + static_cast<std::ptrdiff_t>(nx));
        best.gap = best.value - lower_bound;
        if (best.gap <= opt.gap_tol * (1.0 + std::abs(best.value))) return best;
    }
    throw Error("L-shaped: no convergence within " + std::to_string(opt.max_iterations) + " iterations (gap " +
                std::to_string(best.gap) + ")");
}

}  // namespace detail

inline SaaSolution solve_saa(const TwoStageProblem& p, const Matrix& scenarios, SaaMethod method,
                             const LShapedOptions& options = {}) {
    p.validate();
    detail::check_scenarios(p, scenarios);
    return method == SaaMethod::extensive ? detail::solve_extensive(p, scenarios)
                                          : detail::solve_l_shaped(p, scenarios, options);
}

/// (1/n) sum_j Phi(x, xi^j) by one LP per scenario.
inline double expected_recourse(const TwoStageProblem& p, std::span<const double> x, const Matrix& scenarios,
                                std::size_t workers = 0) {
    detail::check_scenarios(p, scenarios);
    std::vector<double> values(scenarios.rows());
    parallel_for(scenarios.rows(), [&](std::size_t j) { values[j] = eval_recourse_lp(p, x, scenarios.row(j)); },
                 workers ? workers : worker_count());
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

}  // namespace tsqmc
