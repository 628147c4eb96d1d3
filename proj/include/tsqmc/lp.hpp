#pragma once

// Dense two-phase primal simplex for
//
//     min c^T x   s.t.  A x = b,  lower <= x <= upper
//
// with infinite bounds allowed. Nonbasic variables sit at one of their bounds
// (or at zero when free), so bounded variables need no extra rows. Every row
// carries an artificial column; the artificial block of the tableau is B^{-1}
// up to row signs, which is where the duals come from.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "tsqmc/errors.hpp"
#include "tsqmc/linalg.hpp"

namespace tsqmc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LinearProgram {
    std::vector<double> objective;
    Matrix a;  // rows x cols equality matrix
    std::vector<double> rhs;
    std::vector<double> lower;
    std::vector<double> upper;

    [[nodiscard]] std::size_t rows() const noexcept { return a.rows(); }
    [[nodiscard]] std::size_t cols() const noexcept { return a.cols(); }

    /// LP with `cols` variables in [0, inf) and no rows yet.
    static LinearProgram nonnegative(std::size_t rows, std::size_t cols) {
        LinearProgram lp;
        lp.objective.assign(cols, 0.0);
        lp.a = Matrix(rows, cols);
        lp.rhs.assign(rows, 0.0);
        lp.lower.assign(cols, 0.0);
        lp.upper.assign(cols, kInf);
        return lp;
    }

    void validate() const {
        const std::size_t n = cols(), m = rows();
        if (objective.size() != n || lower.size() != n || upper.size() != n || rhs.size() != m)
            throw InvalidArgument("LinearProgram: inconsistent dimensions");
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(objective[j])) throw InvalidArgument("LinearProgram: objective must be finite");
            if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j] || lower[j] == kInf ||
                upper[j] == -kInf)
                throw InvalidArgument("LinearProgram: bad bounds on variable " + std::to_string(j));
        }
        for (double v : a.data())
            if (!std::isfinite(v)) throw InvalidArgument("LinearProgram: matrix entries must be finite");
        for (double v : rhs)
            if (!std::isfinite(v)) throw InvalidArgument("LinearProgram: rhs must be finite");
    }
};

enum class LpStatus { optimal, infeasible, unbounded, stalled };

inline std::string to_string(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
        case LpStatus::stalled: return "stalled";
    }
    return "?";
}

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    double value = 0.0;
    std::vector<double> x;
    std::vector<double> duals;          // one per row: objective sensitivity to rhs
    std::vector<double> reduced_costs;  // c - A^T duals
    std::size_t pivots = 0;

    [[nodiscard]] bool optimal() const noexcept { return status == LpStatus::optimal; }
};

struct LpOptions {
    double pivot_tol = 1e-10;
    double feasibility_tol = 1e-8;
    double optimality_tol = 1e-9;
    /// Consecutive degenerate pivots after which pricing switches for good
    /// from largest reduced cost to Bland's smallest-index rule.
    std::size_t bland_after = 50;
    /// 0 means 10 * (rows + cols)^2.
    std::size_t max_pivots = 0;
};

namespace detail {

class Simplex {
public:
    Simplex(const LinearProgram& lp, const LpOptions& opt)
        : lp_(lp), opt_(opt), m_(lp.rows()), n_(lp.cols()), w_(n_ + m_) {}

    LpSolution run() {
        setup();
        crash();
        LpSolution sol;
        // phase 1
        if (any_artificial_basic()) {
            set_phase_costs(true);
            const auto st = iterate(true);
            if (st == LpStatus::stalled) return finish(LpStatus::stalled);
            recompute_basics();
            double infeas = 0.0;
            for (std::size_t r = 0; r < m_; ++r)
                if (basis_[r] >= n_) infeas += std::abs(x_[basis_[r]]);
            if (infeas > opt_.feasibility_tol * (1.0 + rhs_scale_)) return finish(LpStatus::infeasible);
            drive_out_artificials();
        }
        for (std::size_t i = 0; i < m_; ++i) upper_[n_ + i] = 0.0;
        set_phase_costs(false);
        const auto st = iterate(false);
        if (st != LpStatus::optimal) return finish(st);
        recompute_basics();
        return finish(LpStatus::optimal);
    }

private:
    enum : std::uint8_t { at_lower, at_upper, at_zero, basic };

    double& t(std::size_t r, std::size_t j) { return tab_[r * w_ + j]; }
    double t(std::size_t r, std::size_t j) const { return tab_[r * w_ + j]; }

    void setup() {
        lower_ = lp_.lower;
        upper_ = lp_.upper;
        lower_.resize(w_, 0.0);
        upper_.resize(w_, kInf);
        x_.assign(w_, 0.0);
        state_.assign(w_, at_lower);
        for (std::size_t j = 0; j < n_; ++j) {
            if (std::isfinite(lower_[j])) {
                x_[j] = lower_[j];
                state_[j] = at_lower;
            } else if (std::isfinite(upper_[j])) {
                x_[j] = upper_[j];
                state_[j] = at_upper;
            } else {
                x_[j] = 0.0;
                state_[j] = at_zero;
            }
        }
        rhs_scale_ = 0.0;
        for (double v : lp_.rhs) rhs_scale_ = std::max(rhs_scale_, std::abs(v));
        sign_.assign(m_, 1.0);
        tab_.assign(m_ * w_, 0.0);
        basis_.assign(m_, 0);
        for (std::size_t i = 0; i < m_; ++i) {
            double r = lp_.rhs[i];
            const auto row = lp_.a.row(i);
            for (std::size_t j = 0; j < n_; ++j)
                if (row[j] != 0.0) r -= row[j] * x_[j];
            sign_[i] = r < 0.0 ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n_; ++j) t(i, j) = sign_[i] * row[j];
            t(i, n_ + i) = 1.0;
            basis_[i] = n_ + i;
            state_[n_ + i] = basic;
            x_[n_ + i] = std::abs(r);
        }
    }

    /// Replace artificials by column singletons whose required value lies
    /// within the column's bounds.
    void crash() {
        std::vector<std::size_t> count(n_, 0), where(n_, 0);
        for (std::size_t i = 0; i < m_; ++i) {
            const auto row = lp_.a.row(i);
            for (std::size_t j = 0; j < n_; ++j)
                if (row[j] != 0.0) {
                    ++count[j];
                    where[j] = i;
                }
        }
        std::vector<bool> done(m_, false);
        for (std::size_t j = 0; j < n_; ++j) {
            if (count[j] != 1 || state_[j] == basic) continue;
            const std::size_t i = where[j];
            if (done[i]) continue;
            const double aij = t(i, j);  // sign-adjusted
            const double needed = x_[j] + x_[n_ + i] / aij;
            const double tol = opt_.feasibility_tol;
            if (needed < lower_[j] - tol || needed > upper_[j] + tol) continue;
            x_[j] = std::clamp(needed, lower_[j], upper_[j]);
            x_[n_ + i] = 0.0;
            state_[n_ + i] = at_lower;
            state_[j] = basic;
            basis_[i] = j;
            const double inv = 1.0 / aij;
            for (std::size_t k = 0; k < w_; ++k) t(i, k) *= inv;
            done[i] = true;
        }
    }

    bool any_artificial_basic() const {
        for (std::size_t r = 0; r < m_; ++r)
            if (basis_[r] >= n_ && x_[basis_[r]] > 0.0) return true;
        return false;
    }

    void set_phase_costs(bool phase1) {
        cost_.assign(w_, 0.0);
        if (phase1)
            for (std::size_t i = 0; i < m_; ++i) cost_[n_ + i] = 1.0;
        else
            for (std::size_t j = 0; j < n_; ++j) cost_[j] = lp_.objective[j];
        d_ = cost_;
        for (std::size_t r = 0; r < m_; ++r) {
            const double cb = cost_[basis_[r]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j < w_; ++j) d_[j] -= cb * t(r, j);
        }
        for (std::size_t r = 0; r < m_; ++r) d_[basis_[r]] = 0.0;
    }

    /// x_B = B^{-1} (b - N x_N), with B^{-1} read from the artificial block.
    void recompute_basics() {
        std::vector<double> r(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            double v = lp_.rhs[i];
            const auto row = lp_.a.row(i);
            for (std::size_t j = 0; j < n_; ++j)
                if (state_[j] != basic && row[j] != 0.0) v -= row[j] * x_[j];
            // nonbasic artificials hold zero
            r[i] = v;
        }
        for (std::size_t k = 0; k < m_; ++k) {
            double v = 0.0;
            for (std::size_t i = 0; i < m_; ++i) v += t(k, n_ + i) * sign_[i] * r[i];
            x_[basis_[k]] = v;
        }
    }

    void pivot(std::size_t r, std::size_t q) {
        const double piv = t(r, q);
        double* prow = &tab_[r * w_];
        const double inv = 1.0 / piv;
        nz_.clear();
        for (std::size_t j = 0; j < w_; ++j) {
            if (prow[j] == 0.0) continue;
            prow[j] *= inv;
            nz_.push_back(j);
        }
        prow[q] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            double* row = &tab_[i * w_];
            const double f = row[q];
            if (f == 0.0) continue;
            for (std::size_t j : nz_) row[j] -= f * prow[j];
            row[q] = 0.0;
        }
        const double fd = d_[q];
        if (fd != 0.0) {
            for (std::size_t j : nz_) d_[j] -= fd * prow[j];
            d_[q] = 0.0;
        }
    }

    LpStatus iterate(bool phase1) {
        const std::size_t limit =
            opt_.max_pivots ? opt_.max_pivots : 10 * (m_ + n_) * (m_ + n_);
        const std::size_t ncand = phase1 ? w_ : n_;
        for (;;) {
            if (pivots_ >= limit) return LpStatus::stalled;
            // pricing
            std::size_t q = w_;
            double best = 0.0;
            int dir = 0;
            for (std::size_t j = 0; j < ncand; ++j) {
                const auto s = state_[j];
                if (s == basic) continue;
                if (!phase1 && j >= n_) continue;
                if (lower_[j] == upper_[j]) continue;
                const double dj = d_[j];
                int jd = 0;
                if (dj < -opt_.optimality_tol && (s == at_lower || s == at_zero)) jd = 1;
                else if (dj > opt_.optimality_tol && (s == at_upper || s == at_zero)) jd = -1;
                if (jd == 0) continue;
                if (bland_) {
                    q = j;
                    dir = jd;
                    break;
                }
                if (std::abs(dj) > best) {
                    best = std::abs(dj);
                    q = j;
                    dir = jd;
                }
            }
            if (q == w_) return LpStatus::optimal;

            // ratio test
            double step = upper_[q] - lower_[q];  // bound flip, infinite when unbounded
            std::size_t leave = m_;
            double leave_alpha = 0.0;
            for (std::size_t r = 0; r < m_; ++r) {
                const double alpha = dir * t(r, q);
                if (std::abs(alpha) <= opt_.pivot_tol) continue;
                const std::size_t b = basis_[r];
                double lim;
                if (alpha > 0.0) {
                    if (!std::isfinite(lower_[b])) continue;
                    lim = (x_[b] - lower_[b]) / alpha;
                } else {
                    if (!std::isfinite(upper_[b])) continue;
                    lim = (upper_[b] - x_[b]) / -alpha;
                }
                lim = std::max(lim, 0.0);
                const double eps = std::isfinite(step) ? 1e-12 * (1.0 + step) : 0.0;
                bool take = false;
                if (lim < step - eps)
                    take = true;
                else if (leave != m_ && lim <= step + eps)
                    take = bland_ ? b < basis_[leave] : std::abs(alpha) > std::abs(leave_alpha);
                if (take) {
                    step = std::min(step, lim);
                    leave = r;
                    leave_alpha = alpha;
                }
            }
            if (!std::isfinite(step)) return LpStatus::unbounded;

            ++pivots_;
            if (step <= 1e-12) {
                if (++degenerate_run_ >= opt_.bland_after) bland_ = true;
            } else {
                degenerate_run_ = 0;
            }

            // move
            const double delta = dir * step;
            if (step != 0.0)
                for (std::size_t r = 0; r < m_; ++r) {
                    const double a = t(r, q);
                    if (a != 0.0) x_[basis_[r]] -= delta * a;
                }
            x_[q] += delta;
            if (leave == m_) {
                // bound flip
                state_[q] = dir > 0 ? at_upper : at_lower;
                x_[q] = dir > 0 ? upper_[q] : lower_[q];
                continue;
            }
            const std::size_t out = basis_[leave];
            if (leave_alpha > 0.0) {
                x_[out] = lower_[out];
                state_[out] = at_lower;
            } else {
                x_[out] = upper_[out];
                state_[out] = at_upper;
            }
            state_[q] = basic;
            basis_[leave] = q;
            pivot(leave, q);
        }
    }

    /// Pivot zero-valued basic artificials out in favour of structural
    /// columns. Rows where that is impossible are redundant; their artificial
    /// stays basic, fixed at zero.
    void drive_out_artificials() {
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < n_) continue;
            std::size_t q = n_;
            double best = opt_.pivot_tol * 100.0;
            for (std::size_t j = 0; j < n_; ++j) {
                if (state_[j] == basic) continue;
                if (std::abs(t(r, j)) > best) {
                    best = std::abs(t(r, j));
                    q = j;
                }
            }
            const std::size_t art = basis_[r];
            if (q == n_) {
                x_[art] = 0.0;
                continue;
            }
            // the artificial is at zero, so this pivot keeps x unchanged
            state_[art] = at_lower;
            x_[art] = 0.0;
            state_[q] = basic;
            basis_[r] = q;
            pivot(r, q);
            ++pivots_;
        }
    }

    LpSolution finish(LpStatus status) {
        LpSolution sol;
        sol.status = status;
        sol.pivots = pivots_;
        if (status != LpStatus::optimal) return sol;
        sol.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
        for (std::size_t j = 0; j < n_; ++j) sol.x[j] = std::clamp(sol.x[j], lp_.lower[j], lp_.upper[j]);
        sol.value = 0.0;
        for (std::size_t j = 0; j < n_; ++j) sol.value += lp_.objective[j] * sol.x[j];
        // The reduced cost of artificial i is 0 - pi^T (sign_i e_i).
        sol.duals.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) sol.duals[i] = -sign_[i] * d_[n_ + i];
        sol.reduced_costs.assign(d_.begin(), d_.begin() + static_cast<std::ptrdiff_t>(n_));
        return sol;
    }

    const LinearProgram& lp_;
    LpOptions opt_;
    std::size_t m_, n_, w_;
    std::vector<double> tab_, x_, lower_, upper_, cost_, d_, sign_;
    std::vector<std::size_t> basis_, nz_;
    std::vector<std::uint8_t> state_;
    double rhs_scale_ = 0.0;
    std::size_t pivots_ = 0, degenerate_run_ = 0;
    bool bland_ = false;
};

}  // namespace detail

/// max |A x - b| and the largest bound violation of x.
inline double primal_residual(const LinearProgram& lp, std::span<const double> x) {
    double worst = 0.0;
    for (std::size_t i = 0; i < lp.rows(); ++i) {
        double s = -lp.rhs[i];
        const auto row = lp.a.row(i);
        for (std::size_t j = 0; j < lp.cols(); ++j) s += row[j] * x[j];
        worst = std::max(worst, std::abs(s));
    }
    for (std::size_t j = 0; j < lp.cols(); ++j) {
        worst = std::max(worst, lp.lower[j] - x[j]);
        worst = std::max(worst, x[j] - lp.upper[j]);
    }
    return worst;
}

inline LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {}) {
    lp.validate();
    return detail::Simplex(lp, options).run();
}

/// Largest violation of complementary slackness: reduced costs must vanish
/// for variables strictly between their bounds, be >= 0 at a lower bound and
/// <= 0 at an upper bound.
inline double complementarity_gap(const LinearProgram& lp, const LpSolution& sol, double at_bound_tol = 1e-9) {
    double worst = 0.0;
    for (std::size_t j = 0; j < lp.cols(); ++j) {
        const double d = sol.reduced_costs[j], x = sol.x[j];
        const bool at_lo = std::isfinite(lp.lower[j]) && x - lp.lower[j] <= at_bound_tol;
        const bool at_up = std::isfinite(lp.upper[j]) && lp.upper[j] - x <= at_bound_tol;
        if (at_lo && at_up) continue;
        if (at_lo) worst = std::max(worst, -d);
        else if (at_up) worst = std::max(worst, d);
        else worst = std::max(worst, std::abs(d));
    }
    return worst;
}

// Debug dump layout:
//
//   LP <rows> <cols>
//   objective
//   c_0 c_1 ...
//   rows
//   <i> <rhs> <nnz> j:a_ij j:a_ij ...
//   bounds
//   <j> <lower> <upper>
//
// Numbers carry 17 significant digits; infinities print as inf / -inf.
inline void dump_lp(std::ostream& out, const LinearProgram& lp) {
    const auto old = out.precision(17);
    out << "LP " << lp.rows() << ' ' << lp.cols() << "\nobjective\n";
    for (std::size_t j = 0; j < lp.cols(); ++j) out << (j ? " " : "") << lp.objective[j];
    out << "\nrows\n";
    for (std::size_t i = 0; i < lp.rows(); ++i) {
        const auto row = lp.a.row(i);
        std::size_t nnz = 0;
        for (double v : row) nnz += v != 0.0;
        out << i << ' ' << lp.rhs[i] << ' ' << nnz;
        for (std::size_t j = 0; j < lp.cols(); ++j)
            if (row[j] != 0.0) out << ' ' << j << ':' << row[j];
        out << '\n';
    }
    out << "bounds\n";
    for (std::size_t j = 0; j < lp.cols(); ++j) out << j << ' ' << lp.lower[j] << ' ' << lp.upper[j] << '\n';
    out.precision(old);
}

inline LinearProgram read_lp_dump(std::istream& in) {
    auto num = [](const std::string& s) {
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        return std::stod(s);
    };
    auto expect = [&](const std::string& word) {
        std::string w;
        if (!(in >> w) || w != word) throw InvalidArgument("LP dump: expected '" + word + "'");
    };
    std::size_t m = 0, n = 0;
    expect("LP");
    if (!(in >> m >> n)) throw InvalidArgument("LP dump: bad header");
    LinearProgram lp = LinearProgram::nonnegative(m, n);
    expect("objective");
    std::string tok;
    for (std::size_t j = 0; j < n; ++j) {
        in >> tok;
        lp.objective[j] = num(tok);
    }
    expect("rows");
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t idx = 0, nnz = 0;
        in >> idx >> tok >> nnz;
        if (!in || idx != i) throw InvalidArgument("LP dump: bad row " + std::to_string(i));
        lp.rhs[i] = num(tok);
        for (std::size_t k = 0; k < nnz; ++k) {
            in >> tok;
            const auto colon = tok.find(':');
            if (colon == std::string::npos) throw InvalidArgument("LP dump: bad entry '" + tok + "'");
            lp.a(i, std::stoul(tok.substr(0, colon))) = num(tok.substr(colon + 1));
        }
    }
    expect("bounds");
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t idx = 0;
        std::string lo, up;
        in >> idx >> lo >> up;
        if (!in || idx != j) throw InvalidArgument("LP dump: bad bound line " + std::to_string(j));
        lp.lower[j] = num(lo);
        lp.upper[j] = num(up);
    }
    return lp;
}

} // namespace tsqmc
