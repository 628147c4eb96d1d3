#pragma once

// ANOVA decomposition and effective dimensions.
//
// Two tools live here. For d <= 3 every ANOVA term is computed on a tensor
// Gauss grid, which serves as an exact oracle. For larger d the variance
// shares are estimated by pick-freeze sampling over the unit cube: x and y
// are the two halves of a 2d-dimensional scrambled Sobol' (or MC) point, and
// mixed points take some coordinates from each. Standard errors come from
// independent replications with distinct scrambling seeds.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tsqmc/errors.hpp"
#include "tsqmc/gaussian.hpp"
#include "tsqmc/parallel.hpp"
#include "tsqmc/points.hpp"
#include "tsqmc/quadrature.hpp"
#include "tsqmc/seeds.hpp"

namespace tsqmc {

using Integrand = std::function<double(std::span<const double>)>;

/// f over [0,1)^dim. Must be safe to call concurrently.
struct CubeFunction {
    std::size_t dim = 0;
    Integrand f;
};

/// g(u) = f(Phi^{-1}(u_1), ..., Phi^{-1}(u_d)) for f over R^d with i.i.d.
/// standard normal inputs.
inline CubeFunction gaussian_to_cube(std::size_t dim, Integrand f) {
    return {dim, [dim, f = std::move(f)](std::span<const double> u) {
                std::vector<double> z(dim);
                for (std::size_t i = 0; i < dim; ++i) z[i] = inv_norm_cdf(std::clamp(u[i], kUniformFloor, kUniformCeil));
                return f(z);
            }};
}

// ---------------------------------------------------------------------------
// Exhaustive small-d decomposition

/// Every ANOVA term f_u on the tensor grid, u given as a bit mask over the
/// d coordinates (bit i set means coordinate i in u).
class AnovaTable {
public:
    AnovaTable(std::size_t d, QuadratureRule rule, std::vector<std::vector<double>> terms)
        : d_(d), rule_(std::move(rule)), terms_(std::move(terms)) {}

    [[nodiscard]] std::size_t dim() const noexcept { return d_; }
    [[nodiscard]] const QuadratureRule& rule() const noexcept { return rule_; }
    [[nodiscard]] std::size_t grid_size() const noexcept { return terms_.front().size(); }

    /// f_u at grid node `index` (mixed radix, coordinate 0 fastest).
    [[nodiscard]] const std::vector<double>& term(std::uint32_t mask) const { return terms_.at(mask); }

    [[nodiscard]] double mean() const { return terms_[0][0]; }

    /// Quadrature approximation of <f_u, f_v>.
    [[nodiscard]] double inner(std::uint32_t u, std::uint32_t v) const {
        const auto& a = terms_.at(u);
        const auto& b = terms_.at(v);
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += weight(k) * a[k] * b[k];
        return s;
    }

    /// sigma_u^2 (zero for the empty set).
    [[nodiscard]] double variance(std::uint32_t mask) const { return mask == 0 ? 0.0 : inner(mask, mask); }

    /// sigma^2(f) = ||f||^2 - I(f)^2 on the grid.
    [[nodiscard]] double total_variance() const {
        double s = 0.0;
        std::vector<double> f(grid_size(), 0.0);
        for (const auto& t : terms_)
            for (std::size_t k = 0; k < f.size(); ++k) f[k] += t[k];
        for (std::size_t k = 0; k < f.size(); ++k) s += weight(k) * f[k] * f[k];
        return s - mean() * mean();
    }

    /// Sum over u of |u| sigma_u^2 / sigma^2.
    [[nodiscard]] double mean_dimension() const {
        double num = 0.0, den = 0.0;
        for (std::uint32_t u = 1; u < terms_.size(); ++u) {
            num += std::popcount(u) * variance(u);
            den += variance(u);
        }
        if (!(den > 0.0)) throw ZeroVariance("mean_dimension: f is constant");
        return num / den;
    }

    /// Weight of grid node k.
    [[nodiscard]] double weight(std::size_t k) const {
        double w = 1.0;
        const std::size_t n = rule_.size();
        for (std::size_t i = 0; i < d_; ++i, k /= n) w *= rule_.weights[k % n];
        return w;
    }

private:
    std::size_t d_;
    QuadratureRule rule_;
    std::vector<std::vector<double>> terms_;
};

namespace detail {

inline AnovaTable anova_on_grid(const Integrand& f, std::size_t d, QuadratureRule rule) {
    const std::size_t n = rule.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= n;
    std::vector<double> fv(total);
    std::vector<double> pt(d);
    for (std::size_t k = 0; k < total; ++k) {
        std::size_t rem = k;
        for (std::size_t i = 0; i < d; ++i, rem /= n) pt[i] = rule.nodes[rem % n];
        fv[k] = f(pt);
    }
    const std::uint32_t masks = 1u << d;
    // proj[v]: the integral of f over the coordinates outside v, as a
    // function of the coordinates in v, stored on the full grid.
    std::vector<std::vector<double>> proj(masks, std::vector<double>(total, 0.0));
    for (std::uint32_t v = 0; v < masks; ++v) {
        auto& pv = proj[v];
        for (std::size_t k = 0; k < total; ++k) {
            // accumulate fv[k] into every node sharing the v-coordinates of k
            double w = 1.0;
            std::size_t rem = k, key = 0, stride = 1;
            for (std::size_t i = 0; i < d; ++i, rem /= n, stride *= n) {
                const std::size_t c = rem % n;
                if (v & (1u << i)) key += c * stride;
                else w *= rule.weights[c];
            }
            pv[key] += w * fv[k];
        }
        // spread from representative nodes (others at index 0) to all nodes
        for (std::size_t k = 0; k < total; ++k) {
            std::size_t rem = k, key = 0, stride = 1;
            for (std::size_t i = 0; i < d; ++i, rem /= n, stride *= n)
                if (v & (1u << i)) key += (rem % n) * stride;
            if (key != k) pv[k] = pv[key];
        }
    }
    std::vector<std::vector<double>> terms(masks, std::vector<double>(total, 0.0));
    for (std::uint32_t u = 0; u < masks; ++u)
        for (std::uint32_t v = u;; v = (v - 1) & u) {
            const double sign = ((std::popcount(u) - std::popcount(v)) % 2) ? -1.0 : 1.0;
            for (std::size_t k = 0; k < total; ++k) terms[u][k] += sign * proj[v][k];
            if (v == 0) break;
        }
    return AnovaTable(d, std::move(rule), std::move(terms));
}

}  // namespace detail

struct SmallAnovaOptions {
    QuadratureKind kind = QuadratureKind::uniform01;
    std::size_t nodes = 16;
    /// Convergence: every sigma_u^2 from `nodes` and `2 * nodes` agree within
    /// tol * (sigma^2 + tiny).
    double tol = 1e-6;
};

/// All ANOVA terms of f for d <= 3 on a tensor Gauss-Legendre (uniform on
/// [0,1]) or Gauss-Hermite (standard normal) grid. The returned table uses
/// 2 * nodes points per axis after checking it against `nodes`.
inline AnovaTable anova_terms_small_d(const Integrand& f, std::size_t d, const SmallAnovaOptions& opt = {}) {
    if (d == 0 || d > 3) throw InvalidArgument("anova_terms_small_d: d must be 1, 2 or 3");
    if (opt.nodes == 0) throw InvalidArgument("anova_terms_small_d: need at least one node");
    auto coarse = detail::anova_on_grid(f, d, make_rule(opt.kind, opt.nodes));
    auto fine = detail::anova_on_grid(f, d, make_rule(opt.kind, 2 * opt.nodes));
    const double scale = fine.total_variance() + 1e-300;
    for (std::uint32_t u = 0; u < (1u << d); ++u) {
        const double diff = std::abs(fine.variance(u) - coarse.variance(u));
        if (diff > opt.tol * scale)
            throw QuadratureNotConverged("anova_terms_small_d: variance of term " + std::to_string(u) + " changed by " +
                                         std::to_string(diff) + " when doubling the nodes");
    }
    if (std::abs(fine.mean() - coarse.mean()) > opt.tol * (std::abs(fine.mean()) + std::sqrt(scale)))
        throw QuadratureNotConverged("anova_terms_small_d: mean changed when doubling the nodes");
    return fine;
}

// ---------------------------------------------------------------------------
// Sampling estimators

enum class EstimatorSampler { sobol, mc };

struct EstimatorOptions {
    std::size_t points = 4096;        // per replication
    std::size_t replications = 10;
    std::uint64_t seed = 1;
    EstimatorSampler sampler = EstimatorSampler::sobol;
    std::size_t workers = 0;          // 0 means worker_count()
};

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

inline Estimate mean_and_se(const std::vector<double>& reps) {
    const double n = static_cast<double>(reps.size());
    const double m = std::accumulate(reps.begin(), reps.end(), 0.0) / n;
    if (reps.size() < 2) return {m, 0.0};
    double ss = 0.0;
    for (double r : reps) ss += (r - m) * (r - m);
    return {m, std::sqrt(ss / (n - 1.0) / n)};
}

namespace detail {

/// A point made of coordinates from x (where `from_x` is true) and y.
inline void mix(std::span<const double> x, std::span<const double> y, const std::vector<bool>& from_x,
                std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = from_x[i] ? x[i] : y[i];
}

/// Evaluations of f at x, y and at each requested mixed point, per sample
/// point, for one replication.
struct PickFreezeBatch {
    std::vector<double> fx, fy;
    std::vector<std::vector<double>> mixed;  // [design][point]
};

inline PointSet estimator_points(std::size_t n, std::size_t dim2, EstimatorSampler s, std::uint64_t seed) {
    return s == EstimatorSampler::sobol ? scramble_linear(n, dim2, seed) : mc_points(n, dim2, seed);
}

inline PickFreezeBatch evaluate_batch(const CubeFunction& g, const std::vector<std::vector<bool>>& designs,
                                      const EstimatorOptions& opt, std::size_t replication) {
    const std::size_t d = g.dim, n = opt.points;
    const auto pts = estimator_points(n, 2 * d, opt.sampler, derive_seed(opt.seed, Stream::replication, replication));
    PickFreezeBatch b;
    b.fx.resize(n);
    b.fy.resize(n);
    b.mixed.assign(designs.size(), std::vector<double>(n));
    parallel_for(n, [&](std::size_t j) {
        const auto p = pts.point(j);
        const auto x = p.subspan(0, d), y = p.subspan(d, d);
        b.fx[j] = g.f(x);
        b.fy[j] = g.f(y);
        std::vector<double> z(d);
        for (std::size_t k = 0; k < designs.size(); ++k) {
            mix(x, y, designs[k], z);
            b.mixed[k][j] = g.f(z);
        }
    }, opt.workers ? opt.workers : worker_count());
    return b;
}

/// Variance of the pooled f(x), f(y) values. The n - 1 style correction only
/// suits independent points; with a scrambled net the batch mean is nearly
/// exact and the correction would bias every ratio by about -1/(2n).
inline double pooled_variance(const PickFreezeBatch& b, EstimatorSampler sampler) {
    const std::size_t n = b.fx.size();
    double m = 0.0;
    for (std::size_t j = 0; j < n; ++j) m += b.fx[j] + b.fy[j];
    m /= 2.0 * static_cast<double>(n);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += (b.fx[j] - m) * (b.fx[j] - m) + (b.fy[j] - m) * (b.fy[j] - m);
    const double m2 = 2.0 * static_cast<double>(n);
    return s / (sampler == EstimatorSampler::sobol ? m2 : m2 - 1.0);
}

/// Closed variance D_u from f(x) and f(x_u, y_{-u}):  mean of
/// (f(x) - m)(f(mix) - f(y)), with m the batch mean. Centring leaves the
/// estimate unbiased up to O(1/n) but removes the mu^2 term from its variance.
inline double closed_variance(const PickFreezeBatch& b, const std::vector<double>& mixed) {
    const double n = static_cast<double>(b.fx.size());
    const double m = (std::accumulate(b.fx.begin(), b.fx.end(), 0.0) + std::accumulate(b.fy.begin(), b.fy.end(), 0.0)) /
                     (2.0 * n);
    double s = 0.0;
    for (std::size_t j = 0; j < b.fx.size(); ++j) s += (b.fx[j] - m) * (mixed[j] - b.fy[j]);
    return s / n;
}

/// Total variance of u (Jansen) from f(x) and f(y_u, x_{-u}): half the mean
/// squared difference.
inline double total_variance_of(const PickFreezeBatch& b, const std::vector<double>& mixed) {
    double s = 0.0;
    for (std::size_t j = 0; j < b.fx.size(); ++j) s += (b.fx[j] - mixed[j]) * (b.fx[j] - mixed[j]);
    return 0.5 * s / static_cast<double>(b.fx.size());
}

inline std::vector<bool> closed_design(std::size_t d, std::span<const std::size_t> u) {
    std::vector<bool> from_x(d, false);
    for (auto i : u) from_x.at(i) = true;
    return from_x;
}

inline std::vector<bool> total_design(std::size_t d, std::span<const std::size_t> u) {
    std::vector<bool> from_x(d, true);
    for (auto i : u) from_x.at(i) = false;
    return from_x;
}

inline void check_options(const CubeFunction& g, const EstimatorOptions& opt) {
    if (g.dim == 0) throw InvalidArgument("estimator: integrand has dimension 0");
    if (!g.f) throw InvalidArgument("estimator: integrand is empty");
    if (opt.points < 2) throw InvalidArgument("estimator: need at least two points per replication");
    if (opt.replications < 2) throw InvalidArgument("estimator: need at least two replications for standard errors");
    if (opt.sampler == EstimatorSampler::sobol && 2 * g.dim > DirectionNumberTable::bundled().max_dimension())
        throw InvalidArgument("estimator: dimension too large for the bundled direction numbers");
}

}  // namespace detail

struct VarianceEstimate {
    Estimate variance;
    Estimate mean;
    bool zero = false;  // variance below three standard errors
};

/// sigma^2(f) and I(f) with replication standard errors.
inline VarianceEstimate total_variance(const CubeFunction& g, const EstimatorOptions& opt = {}) {
    detail::check_options(g, opt);
    std::vector<double> vars(opt.replications), means(opt.replications);
    for (std::size_t r = 0; r < opt.replications; ++r) {
        const auto b = detail::evaluate_batch(g, {}, opt, r);
        vars[r] = detail::pooled_variance(b, opt.sampler);
        means[r] = (std::accumulate(b.fx.begin(), b.fx.end(), 0.0) + std::accumulate(b.fy.begin(), b.fy.end(), 0.0)) /
                   (2.0 * static_cast<double>(opt.points));
    }
    VarianceEstimate out{mean_and_se(vars), mean_and_se(means), false};
    out.zero = out.variance.value <= 3.0 * out.variance.se;
    return out;
}

struct SobolIndices {
    Estimate closed;     // S_u
    Estimate total;      // S-bar_u
    bool clipped = false;  // a negative replicate estimate was set to zero
};

/// Closed and total Sobol' indices of the coordinate set u (0-based).
inline SobolIndices sobol_indices(const CubeFunction& g, std::span<const std::size_t> u,
                                  const EstimatorOptions& opt = {}) {
    detail::check_options(g, opt);
    for (auto i : u)
        if (i >= g.dim) throw InvalidArgument("sobol_indices: coordinate index out of range");
    const std::vector<std::vector<bool>> designs{detail::closed_design(g.dim, u), detail::total_design(g.dim, u)};
    std::vector<double> s(opt.replications), st(opt.replications), var(opt.replications);
    SobolIndices out;
    for (std::size_t r = 0; r < opt.replications; ++r) {
        const auto b = detail::evaluate_batch(g, designs, opt, r);
        var[r] = detail::pooled_variance(b, opt.sampler);
        if (!(var[r] > 0.0)) throw ZeroVariance("sobol_indices: f has zero variance");
        s[r] = detail::closed_variance(b, b.mixed[0]) / var[r];
        st[r] = detail::total_variance_of(b, b.mixed[1]) / var[r];
        if (s[r] < 0.0) {
            s[r] = 0.0;
            out.clipped = true;
        }
    }
    const auto v = mean_and_se(var);
    if (v.value <= 3.0 * v.se) throw ZeroVariance("sobol_indices: variance indistinguishable from zero");
    out.closed = mean_and_se(s);
    out.total = mean_and_se(st);
    return out;
}

/// Sum of the total indices of single coordinates.
inline Estimate mean_dimension(const CubeFunction& g, const EstimatorOptions& opt = {}) {
    detail::check_options(g, opt);
    if (g.dim == 1) return {1.0, 0.0};
    std::vector<std::vector<bool>> designs;
    for (std::size_t j = 0; j < g.dim; ++j) {
        const std::size_t u[] = {j};
        designs.push_back(detail::total_design(g.dim, u));
    }
    std::vector<double> reps(opt.replications);
    for (std::size_t r = 0; r < opt.replications; ++r) {
        const auto b = detail::evaluate_batch(g, designs, opt, r);
        const double var = detail::pooled_variance(b, opt.sampler);
        if (!(var > 0.0)) throw ZeroVariance("mean_dimension: f has zero variance");
        double s = 0.0;
        for (const auto& m : b.mixed) s += detail::total_variance_of(b, m);
        reps[r] = s / var;
    }
    return mean_and_se(reps);
}

struct TruncationResult {
    std::size_t dimension = 0;
    double epsilon = 0.01;
    /// (s, estimated (sigma^2 - D_{1..s}) / sigma^2) for every s examined.
    std::vector<std::pair<std::size_t, Estimate>> tail_ratios;
    bool widened = false;  // standard error at the answer exceeds epsilon / 3
};

namespace detail {
/// Tail ratio for the leading block {0..s-1}: the total index of the
/// remaining coordinates, estimated from f(x) and f(x_{1..s}, y_{s+1..d}).
inline Estimate truncation_tail(const CubeFunction& g, std::size_t s, const EstimatorOptions& opt) {
    std::vector<bool> from_x(g.dim, false);
    for (std::size_t i = 0; i < s; ++i) from_x[i] = true;
    std::vector<double> reps(opt.replications);
    for (std::size_t r = 0; r < opt.replications; ++r) {
        const auto b = evaluate_batch(g, {from_x}, opt, r);
        const double var = pooled_variance(b, opt.sampler);
        if (!(var > 0.0)) throw ZeroVariance("truncation_dimension: f has zero variance");
        reps[r] = total_variance_of(b, b.mixed[0]) / var;
    }
    return mean_and_se(reps);
}
}  // namespace detail

/// Smallest s whose leading block {1..s} carries at least (1 - eps) of the
/// variance, by binary search on the estimated tail ratio.
inline TruncationResult truncation_dimension(const CubeFunction& g, double eps = 0.01,
                                             const EstimatorOptions& opt = {}) {
    detail::check_options(g, opt);
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("truncation_dimension: epsilon must lie in (0, 1)");
    TruncationResult out;
    out.epsilon = eps;
    std::size_t lo = 1, hi = g.dim;  // answer in [lo, hi]; s = d always qualifies
    std::optional<Estimate> at_hi;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        const auto e = detail::truncation_tail(g, mid, opt);
        out.tail_ratios.emplace_back(mid, e);
        if (e.value <= eps) {
            hi = mid;
            at_hi = e;
        } else {
            lo = mid + 1;
        }
    }
    out.dimension = lo;
    std::sort(out.tail_ratios.begin(), out.tail_ratios.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (at_hi) out.widened = at_hi->se > eps / 3.0;
    return out;
}

struct PairShare {
    std::size_t i = 0, j = 0;
    Estimate share;  // sigma_{ij}^2 / sigma^2
};

struct SuperpositionProfile {
    std::vector<Estimate> first_order;  // S_{j}, j = 0..d-1
    Estimate order1;                    // sum_j S_{j}
    std::vector<PairShare> pairs;       // pure second-order shares of the examined pairs
    Estimate order12;                   // order1 plus the pair shares
    double epsilon = 0.01;
    bool order1_certified = false;      // order1 >= 1 - eps, so d_S(eps) = 1
    bool order12_certified = false;     // order12 >= 1 - eps, so d_S(eps) <= 2
};

/// First-order shares of every coordinate plus the second-order shares of
/// all pairs among the `top` coordinates with the largest first-order shares.
inline SuperpositionProfile superposition_profile(const CubeFunction& g, double eps = 0.01,
                                                  const EstimatorOptions& opt = {}, std::size_t top = 4) {
    detail::check_options(g, opt);
    const std::size_t d = g.dim;
    std::vector<std::vector<bool>> designs;
    for (std::size_t j = 0; j < d; ++j) {
        const std::size_t u[] = {j};
        designs.push_back(detail::closed_design(d, u));
    }
    std::vector<detail::PickFreezeBatch> batches;
    std::vector<double> vars;
    for (std::size_t r = 0; r < opt.replications; ++r) {
        batches.push_back(detail::evaluate_batch(g, designs, opt, r));
        vars.push_back(detail::pooled_variance(batches.back(), opt.sampler));
        if (!(vars.back() > 0.0)) throw ZeroVariance("superposition_profile: f has zero variance");
    }
    SuperpositionProfile out;
    out.epsilon = eps;
    std::vector<std::vector<double>> first(d, std::vector<double>(opt.replications));
    std::vector<double> order1(opt.replications, 0.0);
    for (std::size_t r = 0; r < opt.replications; ++r)
        for (std::size_t j = 0; j < d; ++j) {
            first[j][r] = detail::closed_variance(batches[r], batches[r].mixed[j]) / vars[r];
            order1[r] += first[j][r];
        }
    for (std::size_t j = 0; j < d; ++j) out.first_order.push_back(mean_and_se(first[j]));
    out.order1 = mean_and_se(order1);

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return out.first_order[a].value > out.first_order[b].value; });
    order.resize(std::min(top, d));
    std::sort(order.begin(), order.end());
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < order.size(); ++a)
        for (std::size_t b = a + 1; b < order.size(); ++b) pairs.emplace_back(order[a], order[b]);

    std::vector<double> order12 = order1;
    if (!pairs.empty()) {
        std::vector<std::vector<bool>> pair_designs;
        for (const auto& [i, j] : pairs) {
            const std::size_t u[] = {i, j};
            pair_designs.push_back(detail::closed_design(d, u));
        }
        std::vector<std::vector<double>> share(pairs.size(), std::vector<double>(opt.replications));
        for (std::size_t r = 0; r < opt.replications; ++r) {
            const auto b = detail::evaluate_batch(g, pair_designs, opt, r);
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                const auto [i, j] = pairs[k];
                const double closed = detail::closed_variance(b, b.mixed[k]) / vars[r];
                share[k][r] = closed - first[i][r] - first[j][r];
                order12[r] += share[k][r];
            }
        }
        for (std::size_t k = 0; k < pairs.size(); ++k)
            out.pairs.push_back({pairs[k].first, pairs[k].second, mean_and_se(share[k])});
    }
    out.order12 = mean_and_se(order12);
    out.order1_certified = out.order1.value >= 1.0 - eps;
    out.order12_certified = out.order12.value >= 1.0 - eps;
    return out;
}

struct DimensionReport {
    double epsilon = 0.01;
    VarianceEstimate variance;
    Estimate mean_dimension;
    std::vector<Estimate> total_order;  // S-bar_{j}
    TruncationResult truncation;
    SuperpositionProfile superposition;
};

/// Everything above for one integrand.
inline DimensionReport dimension_report(const CubeFunction& g, double eps = 0.01, const EstimatorOptions& opt = {},
                                        std::size_t top = 4) {
    detail::check_options(g, opt);
    DimensionReport rep;
    rep.epsilon = eps;
    rep.variance = total_variance(g, opt);
    if (rep.variance.zero) throw ZeroVariance("dimension_report: variance indistinguishable from zero");
    std::vector<std::vector<bool>> designs;
    for (std::size_t j = 0; j < g.dim; ++j) {
        const std::size_t u[] = {j};
        designs.push_back(detail::total_design(g.dim, u));
    }
    std::vector<std::vector<double>> tot(g.dim, std::vector<double>(opt.replications));
    std::vector<double> md(opt.replications, 0.0);
    for (std::size_t r = 0; r < opt.replications; ++r) {
        const auto b = detail::evaluate_batch(g, designs, opt, r);
        const double var = detail::pooled_variance(b, opt.sampler);
        for (std::size_t j = 0; j < g.dim; ++j) {
            tot[j][r] = detail::total_variance_of(b, b.mixed[j]) / var;
            md[r] += tot[j][r];
        }
    }
    for (auto& t : tot) rep.total_order.push_back(mean_and_se(t));
    rep.mean_dimension = g.dim == 1 ? Estimate{1.0, 0.0} : mean_and_se(md);
    rep.truncation = truncation_dimension(g, eps, opt);
    rep.superposition = superposition_profile(g, eps, opt, top);
    return rep;
}

inline nlohmann::json to_json(const Estimate& e) { return {{"value", e.value}, {"se", e.se}}; }

inline nlohmann::json to_json(const DimensionReport& r) {
    using nlohmann::json;
    json j;
    j["epsilon"] = r.epsilon;
    j["total_variance"] = to_json(r.variance.variance);
    j["mean"] = to_json(r.variance.mean);
    j["mean_dimension"] = to_json(r.mean_dimension);
    j["truncation_dimension"] = r.truncation.dimension;
    j["truncation_widened"] = r.truncation.widened;
    json tails = json::array();
    for (const auto& [s, e] : r.truncation.tail_ratios) tails.push_back({{"s", s}, {"tail_ratio", to_json(e)}});
    j["truncation_tail_ratios"] = tails;
    json first = json::array(), total = json::array();
    for (std::size_t i = 0; i < r.superposition.first_order.size(); ++i)
        first.push_back({{"index", i + 1}, {"value", r.superposition.first_order[i].value},
                         {"se", r.superposition.first_order[i].se}});
    for (std::size_t i = 0; i < r.total_order.size(); ++i)
        total.push_back({{"index", i + 1}, {"value", r.total_order[i].value}, {"se", r.total_order[i].se}});
    j["first_order"] = first;
    j["total_order"] = total;
    json pairs = json::array();
    for (const auto& p : r.superposition.pairs)
        pairs.push_back({{"i", p.i + 1}, {"j", p.j + 1}, {"value", p.share.value}, {"se", p.share.se}});
    j["pairs"] = pairs;
    j["order1_ratio"] = to_json(r.superposition.order1);
    j["order12_ratio"] = to_json(r.superposition.order12);
    if (r.superposition.order1_certified) j["superposition_dimension_at_most"] = 1;
    else if (r.superposition.order12_certified) j["superposition_dimension_at_most"] = 2;
    else j["superposition_dimension_at_most"] = nullptr;
    return j;
}

}  // namespace tsqmc
