#pragma once

// Two-stage linear recourse:
//
//   Phi(x, xi) = min { q^T y : W y = h(xi) - T x, y_lower <= y <= y_upper },
//   h(xi) = (xi, hbar),
//
// and, when y >= 0 is the only bound, its dual form
//
//   Phi(x, xi) = max_j < v^j, h(xi) - T x >
//
// over the vertices v^j of D = { z : W^T z <= q }. Along one coordinate
// s = xi_k the dual form is the upper envelope of affine functions of s,
// which gives closed forms for the projection P_k f = E_k[f] under a
// Gaussian marginal and for its derivatives in the other coordinates.
// Coordinate indices in this header are 0-based.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsqmc/errors.hpp"
#include "tsqmc/gaussian.hpp"
#include "tsqmc/linalg.hpp"
#include "tsqmc/lp.hpp"
#include "tsqmc/vertices.hpp"

namespace tsqmc {

/// { x : lower <= x <= upper, row_lower <= G x <= row_upper }.
struct FirstStageSet {
    std::vector<double> lower;
    std::vector<double> upper;
    Matrix g;  // may have zero rows
    std::vector<double> row_lower;
    std::vector<double> row_upper;

    [[nodiscard]] std::size_t dim() const noexcept { return lower.size(); }

    static FirstStageSet box(std::vector<double> lo, std::vector<double> hi) {
        FirstStageSet s;
        s.g = Matrix(0, lo.size());
        s.lower = std::move(lo);
        s.upper = std::move(hi);
        return s;
    }

    /// Largest violation of any constraint by x.
    [[nodiscard]] double violation(std::span<const double> x) const {
        double v = 0.0;
        for (std::size_t i = 0; i < dim(); ++i) v = std::max({v, lower[i] - x[i], x[i] - upper[i]});
        for (std::size_t r = 0; r < g.rows(); ++r) {
            const double gx = dot(g.row(r), x);
            v = std::max({v, row_lower[r] - gx, gx - row_upper[r]});
        }
        return v;
    }
};

struct TwoStageProblem {
    std::string name;
    std::vector<double> c;  // first-stage cost
    FirstStageSet x_set;
    std::vector<double> q;  // recourse cost, m-bar entries
    Matrix w;               // r x m-bar
    Matrix t;               // r x (first-stage dimension)
    std::vector<double> hbar;  // r - d deterministic tail of h(xi)
    std::vector<double> y_lower;
    std::vector<double> y_upper;
    std::vector<double> mean;  // xi = mean + A eta, eta ~ N(0, I)
    Matrix factor;

    [[nodiscard]] std::size_t r() const noexcept { return w.rows(); }
    [[nodiscard]] std::size_t d() const noexcept { return w.rows() - hbar.size(); }
    [[nodiscard]] std::size_t first_stage_dim() const noexcept { return c.size(); }

    /// True when the recourse variables are exactly y >= 0, so the dual
    /// vertex form applies.
    [[nodiscard]] bool standard_recourse() const {
        for (std::size_t j = 0; j < q.size(); ++j)
            if (y_lower[j] != 0.0 || y_upper[j] != kInf) return false;
        return true;
    }

    void validate() const {
        const std::size_t rr = r(), mbar = w.cols(), m = c.size();
        if (hbar.size() > rr) throw InvalidArgument("TwoStageProblem: hbar longer than the number of rows");
        if (q.size() != mbar || y_lower.size() != mbar || y_upper.size() != mbar)
            throw InvalidArgument("TwoStageProblem: q / y bounds must match the columns of W");
        if (t.rows() != rr || t.cols() != m) throw InvalidArgument("TwoStageProblem: T must be r x m");
        if (x_set.dim() != m || x_set.upper.size() != m || x_set.g.cols() != m ||
            x_set.row_lower.size() != x_set.g.rows() || x_set.row_upper.size() != x_set.g.rows())
            throw InvalidArgument("TwoStageProblem: first-stage set does not match c");
        if (mean.size() != d() || factor.rows() != d() || factor.cols() != d())
            throw InvalidArgument("TwoStageProblem: distribution must have dimension d");
    }

    /// Standard normal marginals (mean 0, identity factor) for a d-dimensional xi.
    void set_standard_normal() {
        mean.assign(d(), 0.0);
        factor = Matrix::identity(d());
    }
};

/// h(xi) - T x.
inline std::vector<double> recourse_rhs(const TwoStageProblem& p, std::span<const double> x, std::span<const double> xi) {
    if (xi.size() != p.d()) throw InvalidArgument("recourse: xi has the wrong dimension");
    if (x.size() != p.first_stage_dim()) throw InvalidArgument("recourse: x has the wrong dimension");
    std::vector<double> rhs(p.r());
    for (std::size_t i = 0; i < p.r(); ++i) {
        double v = i < p.d() ? xi[i] : p.hbar[i - p.d()];
        const auto tr = p.t.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) v -= tr[j] * x[j];
        rhs[i] = v;
    }
    return rhs;
}

/// Second-stage LP for given x and xi.
inline LinearProgram recourse_lp(const TwoStageProblem& p, std::span<const double> x, std::span<const double> xi) {
    LinearProgram lp;
    lp.objective = p.q;
    lp.a = p.w;
    lp.rhs = recourse_rhs(p, x, xi);
    lp.lower = p.y_lower;
    lp.upper = p.y_upper;
    return lp;
}

namespace detail {
inline double checked_recourse_value(const LpSolution& sol) {
    switch (sol.status) {
        case LpStatus::optimal: return sol.value;
        case LpStatus::infeasible:
            throw RecourseInfeasible("second stage infeasible: relatively complete recourse (A1) fails");
        case LpStatus::unbounded:
            throw RecourseUnbounded("second stage unbounded: dual feasibility (A2) fails");
        case LpStatus::stalled: throw Error("second stage LP stalled");
    }
    throw Error("unreachable");
}
}  // namespace detail

/// Phi(x, xi) by the simplex method.
inline double eval_recourse_lp(const TwoStageProblem& p, std::span<const double> x, std::span<const double> xi) {
    return detail::checked_recourse_value(solve_lp(recourse_lp(p, x, xi)));
}

/// Full second-stage solution (including duals) for cut generation.
inline LpSolution solve_recourse(const TwoStageProblem& p, std::span<const double> x, std::span<const double> xi) {
    auto sol = solve_lp(recourse_lp(p, x, xi));
    detail::checked_recourse_value(sol);
    return sol;
}

struct DualValue {
    double value = 0.0;
    std::size_t argmax = 0;
};

/// max_j < v^j, (xi, hbar) - T x >; ties go to the lowest vertex index.
inline DualValue eval_recourse_dual(const VertexList& vl, std::span<const double> x, std::span<const double> xi,
                                    std::span<const double> hbar, const Matrix& t) {
    if (vl.empty()) throw InvalidArgument("eval_recourse_dual: no vertices");
    const std::size_t r = vl.vertices.front().size();
    if (xi.size() + hbar.size() != r || t.rows() != r || t.cols() != x.size())
        throw InvalidArgument("eval_recourse_dual: dimension mismatch");
    std::vector<double> rhs(r);
    for (std::size_t i = 0; i < r; ++i) {
        double v = i < xi.size() ? xi[i] : hbar[i - xi.size()];
        for (std::size_t j = 0; j < x.size(); ++j) v -= t(i, j) * x[j];
        rhs[i] = v;
    }
    DualValue best{-kInf, 0};
    for (std::size_t j = 0; j < vl.size(); ++j) {
        const double v = dot(vl.vertices[j], rhs);
        if (v > best.value) best = {v, j};
    }
    return best;
}

/// Dual vertices of the recourse problem (requires y >= 0 recourse).
inline VertexList recourse_vertices(const TwoStageProblem& p) {
    if (!p.standard_recourse()) throw InvalidArgument("recourse_vertices: dual vertex form needs y >= 0 recourse");
    return enumerate_vertices(p.w, p.q);
}

struct GeometricFlag {
    std::size_t first = 0;   // vertex indices of an adjacent pair
    std::size_t second = 0;
    std::size_t component = 0;  // coordinate where they coincide
};

struct GeometricReport {
    bool satisfied = true;
    std::vector<GeometricFlag> flags;
};

/// (A5): adjacent vertices must differ in every one of the first `dims`
/// components (all components when dims is 0).
inline GeometricReport check_geometric_condition(const VertexList& vl,
                                                 const std::vector<std::pair<std::size_t, std::size_t>>& adjacency,
                                                 std::size_t dims = 0, double tol = 1e-9) {
    GeometricReport rep;
    for (const auto& [i, j] : adjacency) {
        const auto& a = vl.vertices[i];
        const auto& b = vl.vertices[j];
        const std::size_t n = dims == 0 ? a.size() : std::min(dims, a.size());
        for (std::size_t c = 0; c < n; ++c)
            if (std::abs(a[c] - b[c]) <= tol) rep.flags.push_back({i, j, c});
    }
    rep.satisfied = rep.flags.empty();
    return rep;
}

/// Integrand f(xi) = Phi(x, xi) with x fixed, in dual-vertex form, plus the
/// Gaussian marginal of each coordinate of xi.
struct IntegrandSpec {
    VertexList vertices;
    std::vector<double> z;  // z(x) = (0, hbar) - T x, length r
    std::size_t d = 0;
    std::vector<GaussianMarginal> marginals;

    static IntegrandSpec from_problem(const TwoStageProblem& p, std::span<const double> x) {
        p.validate();
        for (std::size_t i = 0; i < p.d(); ++i)
            for (std::size_t j = 0; j < p.d(); ++j)
                if (p.factor(i, j) != (i == j ? p.factor(i, i) : 0.0))
                    throw InvalidArgument("IntegrandSpec: projections need independent coordinates (diagonal factor)");
        if (p.x_set.violation(x) > 1e-8) throw InvalidArgument("IntegrandSpec: x is not in X");
        IntegrandSpec s;
        s.vertices = recourse_vertices(p);
        s.d = p.d();
        const std::vector<double> zero_xi(p.d(), 0.0);
        s.z = recourse_rhs(p, x, zero_xi);
        for (std::size_t i = 0; i < p.d(); ++i) s.marginals.emplace_back(p.mean[i], p.factor(i, i));
        return s;
    }

    [[nodiscard]] double operator()(std::span<const double> xi) const {
        double best = -kInf;
        for (const auto& v : vertices.vertices) {
            double s = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * ((i < d ? xi[i] : 0.0) + z[i]);
            best = std::max(best, s);
        }
        return best;
    }
};

/// Upper envelope of s -> <v^j, (xi_s^k, hbar) - T x>.
struct BreakpointPath {
    std::size_t k = 0;
    std::vector<double> breakpoints;   // s_1 < ... < s_p
    std::vector<std::size_t> active;   // j_1 .. j_{p+1}
    std::vector<double> slopes;        // per active segment: v_k^{j_i}
    std::vector<double> intercepts;    // per active segment
    /// Vertices whose line coincides with an active line (same slope and
    /// intercept). The envelope is then not determined by a single vertex,
    /// which happens exactly when an (A5)-violating pair is active.
    std::vector<std::pair<std::size_t, std::size_t>> ties;

    [[nodiscard]] std::size_t p() const noexcept { return breakpoints.size(); }
};

/// Envelope along coordinate k with the other coordinates taken from xi
/// (xi[k] is ignored). Equal lines resolve to the lowest vertex index and are
/// recorded in `ties`.
inline BreakpointPath breakpoints(const IntegrandSpec& spec, std::size_t k, std::span<const double> xi,
                                  double tol = 1e-12) {
    if (k >= spec.d) throw InvalidArgument("breakpoints: coordinate index out of range");
    if (xi.size() != spec.d) throw InvalidArgument("breakpoints: xi has the wrong dimension");
    const auto& vs = spec.vertices.vertices;
    const std::size_t nv = vs.size();
    std::vector<double> a(nv), b(nv);
    for (std::size_t j = 0; j < nv; ++j) {
        a[j] = vs[j][k];
        double s = 0.0;
        for (std::size_t i = 0; i < vs[j].size(); ++i) {
            const double coord = (i < spec.d && i != k ? xi[i] : 0.0) + spec.z[i];
            s += vs[j][i] * coord;
        }
        b[j] = s;
    }
    std::vector<std::size_t> order(nv);
    std::iota(order.begin(), order.end(), 0);
    auto same = [&](double u, double v) { return std::abs(u - v) <= tol * (1.0 + std::max(std::abs(u), std::abs(v))); };
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (!same(a[i], a[j])) return a[i] < a[j];
        if (!same(b[i], b[j])) return b[i] > b[j];
        return i < j;
    });
    // one representative per slope, remembering exact duplicates
    std::vector<std::size_t> lines;
    std::vector<std::vector<std::size_t>> dup;
    for (std::size_t idx : order) {
        if (!lines.empty() && same(a[lines.back()], a[idx])) {
            if (same(b[lines.back()], b[idx])) dup.back().push_back(idx);
            continue;
        }
        lines.push_back(idx);
        dup.emplace_back();
    }
    auto cross = [&](std::size_t i, std::size_t j) { return (b[i] - b[j]) / (a[j] - a[i]); };
    std::vector<std::size_t> hull, hull_pos;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::size_t l = lines[li];
        while (hull.size() >= 2) {
            const std::size_t l1 = hull[hull.size() - 2], l2 = hull.back();
            if (cross(l1, l) <= cross(l1, l2)) {
                hull.pop_back();
                hull_pos.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(l);
        hull_pos.push_back(li);
    }
    BreakpointPath path;
    path.k = k;
    for (std::size_t h = 0; h < hull.size(); ++h) {
        path.active.push_back(hull[h]);
        path.slopes.push_back(a[hull[h]]);
        path.intercepts.push_back(b[hull[h]]);
        for (std::size_t other : dup[hull_pos[h]]) path.ties.emplace_back(hull[h], other);
        if (h + 1 < hull.size()) path.breakpoints.push_back(cross(hull[h], hull[h + 1]));
    }
    return path;
}

namespace detail {
/// Mass and first moment of N(mu, sigma^2) over [lo, hi].
inline PartialMoment marginal_moment(const GaussianMarginal& g, double lo, double hi) {
    const auto pm = partial_moment((lo - g.mean) / g.sigma, (hi - g.mean) / g.sigma);
    return {pm.mass, g.mean * pm.mass + g.sigma * pm.first_moment};
}
}  // namespace detail

/// P_k f at xi (xi[k] ignored): the envelope integrated segment by segment
/// against the Gaussian marginal of coordinate k.
inline double project_k(const IntegrandSpec& spec, std::size_t k, std::span<const double> xi) {
    const auto path = breakpoints(spec, k, xi);
    const auto& g = spec.marginals[k];
    double total = 0.0;
    for (std::size_t i = 0; i < path.active.size(); ++i) {
        const double lo = i == 0 ? -kInf : path.breakpoints[i - 1];
        const double hi = i == path.p() ? kInf : path.breakpoints[i];
        const auto pm = detail::marginal_moment(g, lo, hi);
        total += path.slopes[i] * pm.first_moment + path.intercepts[i] * pm.mass;
    }
    return total;
}

namespace detail {
inline void require_other(const IntegrandSpec& spec, std::size_t k, std::size_t l) {
    if (l >= spec.d) throw InvalidArgument("projection derivative: coordinate index out of range");
    if (l == k) throw InvalidArgument("projection derivative: differentiate in a coordinate other than k");
}
}  // namespace detail

/// d/dxi_l P_k f = -sum_i w_l^i Phi_k(s_i) + v_l^{j_{p+1}},  w^i = v^{j_{i+1}} - v^{j_i}.
inline double project_k_grad(const IntegrandSpec& spec, std::size_t k, std::size_t l, std::span<const double> xi) {
    detail::require_other(spec, k, l);
    const auto path = breakpoints(spec, k, xi);
    const auto& vs = spec.vertices.vertices;
    for (const auto& [i, j] : path.ties)
        if (std::abs(vs[i][l] - vs[j][l]) > 1e-12)
            throw UndefinedDerivative("P_k f is not differentiable here: tied vertices " + std::to_string(i) + " and " +
                                      std::to_string(j) + " differ in component " + std::to_string(l));
    const auto& g = spec.marginals[k];
    double sum = vs[path.active.back()][l];
    for (std::size_t i = 0; i < path.p(); ++i) {
        const double wl = vs[path.active[i + 1]][l] - vs[path.active[i]][l];
        sum -= wl * g.cdf(path.breakpoints[i]);
    }
    return sum;
}

/// d^2/(dxi_l dxi_r) P_k f = sum_i w_l^i w_r^i / w_k^i rho_k(s_i).
inline double project_k_hess(const IntegrandSpec& spec, std::size_t k, std::size_t l, std::size_t r,
                             std::span<const double> xi) {
    detail::require_other(spec, k, l);
    detail::require_other(spec, k, r);
    const auto path = breakpoints(spec, k, xi);
    if (!path.ties.empty())
        throw UndefinedDerivative("second derivative of P_k f undefined: adjacent active vertices share component " +
                                  std::to_string(k));
    const auto& vs = spec.vertices.vertices;
    const auto& g = spec.marginals[k];
    double sum = 0.0;
    for (std::size_t i = 0; i < path.p(); ++i) {
        const auto& lo = vs[path.active[i]];
        const auto& hi = vs[path.active[i + 1]];
        const double wk = hi[k] - lo[k];
        if (std::abs(wk) <= 1e-12)
            throw UndefinedDerivative("second derivative of P_k f undefined: w_k vanishes on an active pair");
        sum += (hi[l] - lo[l]) * (hi[r] - lo[r]) / wk * g.pdf(path.breakpoints[i]);
    }
    return sum;
}

/// Adaptive Simpson quadrature of a continuous function on [a, b].
inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol = 1e-10,
                                 int max_depth = 40) {
    struct Rec {
        static double run(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
            const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double diff = left + right - whole;
            if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
            return run(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
                   run(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
        }
    };
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return Rec::run(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

namespace detail {
/// E[g(X)] for X ~ N(mu, sigma^2), integrating over mu +- 9 sigma in the
/// standardized variable.
inline double gaussian_expectation(const GaussianMarginal& m, const std::function<double(double)>& g, double tol) {
    auto integrand = [&](double t) { return g(m.mean + m.sigma * t) * norm_pdf(t); };
    return integrate_adaptive(integrand, -9.0, 9.0, tol);
}
}  // namespace detail

/// P_{k,j} f: the closed-form P_k f integrated numerically over coordinate j.
inline double project_pair(const IntegrandSpec& spec, std::size_t k, std::size_t j, std::span<const double> xi,
                           double tol = 1e-10) {
    detail::require_other(spec, k, j);
    std::vector<double> pt(xi.begin(), xi.end());
    return detail::gaussian_expectation(spec.marginals[j], [&](double s) {
        pt[j] = s;
        return project_k(spec, k, pt);
    }, tol);
}

/// d/dxi_l P_{k,j} f = P_j (d/dxi_l P_k f), l outside {k, j}.
inline double project_pair_grad(const IntegrandSpec& spec, std::size_t k, std::size_t j, std::size_t l,
                                std::span<const double> xi, double tol = 1e-10) {
    detail::require_other(spec, k, j);
    detail::require_other(spec, k, l);
    if (l == j) throw InvalidArgument("project_pair_grad: l must differ from j");
    std::vector<double> pt(xi.begin(), xi.end());
    return detail::gaussian_expectation(spec.marginals[j], [&](double s) {
        pt[j] = s;
        return project_k_grad(spec, k, l, pt);
    }, tol);
}

struct OneSidedDerivatives {
    double left = 0.0;
    double right = 0.0;
    double step = 0.0;
};

/// Forward and backward differences of P_k f in coordinate l at xi.
inline OneSidedDerivatives one_sided_derivatives(const IntegrandSpec& spec, std::size_t k, std::size_t l,
                                                 std::span<const double> xi, double step = 1e-6) {
    detail::require_other(spec, k, l);
    std::vector<double> pt(xi.begin(), xi.end());
    const double f0 = project_k(spec, k, pt);
    pt[l] = xi[l] + step;
    const double fp = project_k(spec, k, pt);
    pt[l] = xi[l] - step;
    const double fm = project_k(spec, k, pt);
    return {(f0 - fm) / step, (fp - f0) / step, step};
}

struct SmoothnessScan {
    bool c1 = true;
    double worst_jump = 0.0;   // largest |right - left| difference quotient
    double worst_at = 0.0;     // value of xi_l where it occurred
};

/// Scans P_k f along coordinate l over [lo, hi], including the points where
/// the envelope changes (kinks of f), and compares one-sided difference
/// quotients. A C^1 function shows jumps of order `step`; a kink shows a
/// jump of order one.
inline SmoothnessScan scan_c1(const IntegrandSpec& spec, std::size_t k, std::size_t l, std::span<const double> xi,
                              double lo, double hi, std::size_t points = 201, double step = 1e-6,
                              double jump_tol = 1e-3) {
    detail::require_other(spec, k, l);
    std::vector<double> grid;
    for (std::size_t i = 0; i < points; ++i)
        grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
    // values of xi_l where two vertex lines tie in coordinate k: their
    // intercepts coincide and the envelope composition can switch
    const auto& vs = spec.vertices.vertices;
    for (std::size_t a = 0; a < vs.size(); ++a)
        for (std::size_t b = a + 1; b < vs.size(); ++b) {
            if (std::abs(vs[a][k] - vs[b][k]) > 1e-12) continue;
            const double dl = vs[a][l] - vs[b][l];
            if (std::abs(dl) <= 1e-12) continue;
            double rest = 0.0;
            for (std::size_t i = 0; i < vs[a].size(); ++i) {
                if (i == l) continue;
                const double coord = (i < spec.d && i != k ? xi[i] : 0.0) + spec.z[i];
                rest += (vs[a][i] - vs[b][i]) * coord;
            }
            const double at = -rest / dl - spec.z[l];
            if (at >= lo && at <= hi) grid.push_back(at);
        }
    SmoothnessScan out;
    std::vector<double> pt(xi.begin(), xi.end());
    for (double g : grid) {
        pt[l] = g;
        const auto d = one_sided_derivatives(spec, k, l, pt, step);
        const double jump = std::abs(d.right - d.left);
        if (jump > out.worst_jump) {
            out.worst_jump = jump;
            out.worst_at = g;
        }
    }
    out.c1 = out.worst_jump <= jump_tol;
    return out;
}

struct SensitivityBounds {
    std::vector<double> total_index;  // upper bound on the total index of each coordinate
    double mean_dimension = 0.0;      // upper bound on the mean dimension
};

/// Upper bounds from the piecewise-constant gradient of f: with marginal
/// variances sigma_i^2 and total variance sigma^2(f),
///   S-bar_i <= sigma_i^2 max_j |v_i^j|^2 / sigma^2(f),
///   d-bar_S <= max_j ||v^j||_inf^2 sum_i sigma_i^2 / sigma^2(f),
/// with v restricted to its first d components.
inline SensitivityBounds sensitivity_upper_bounds(const VertexList& vl, std::span<const double> marginal_variances,
                                                  double total_variance) {
    if (!(total_variance > 0.0)) throw ZeroVariance("sensitivity bounds need a positive total variance");
    const std::size_t d = marginal_variances.size();
    SensitivityBounds out;
    out.total_index.assign(d, 0.0);
    double vmax = 0.0, sum_var = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double m = 0.0;
        for (const auto& v : vl.vertices) m = std::max(m, std::abs(v[i]));
        out.total_index[i] = marginal_variances[i] * m * m / total_variance;
        vmax = std::max(vmax, m);
        sum_var += marginal_variances[i];
    }
    out.mean_dimension = vmax * vmax * sum_var / total_variance;
    return out;
}

}  // namespace tsqmc
