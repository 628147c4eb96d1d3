#pragma once

// Production planning with I owned units and m1 + m2 outside providers over
// T periods. Stage one fixes unit outputs x_{i,t}; stage two buys y_{j,t} to
// cover the random demand xi_t, with ramp limits on both.
//
// Second-stage standard form (variables in this order):
//   y_{j,t}  j < m1: [w, z], j >= m1: [w, inf)   cost cbar_{j,t}
//   e_t      demand surplus, [0, inf)            cost 0
//   s_{j,t}  ramp slack, [0, 2 rho_{j,t}]        cost 0
// rows:
//   sum_j y_{j,t} - e_t           = xi_t - sum_i x_{i,t}
//   y_{j,t} - y_{j,t+1} + s_{j,t} = rho_{j,t}
// so |y_{j,t} - y_{j,t+1}| <= rho_{j,t}, and hbar holds the rho values.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "tsqmc/covariance.hpp"
#include "tsqmc/errors.hpp"
#include "tsqmc/lp.hpp"
#include "tsqmc/recourse.hpp"
#include "tsqmc/seeds.hpp"

namespace tsqmc {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct ProductionModelSpec {
    std::size_t horizon = 20;
    std::size_t units = 3;
    std::size_t providers1 = 2;
    std::size_t providers2 = 1;

    Range a{0.001, 0.003};
    Range b{0.3, 0.6};
    Range delta{0.3, 0.35};
    Range w{0.000001, 0.00002};
    Range z{5.0, 7.0};
    Range rho{1.0, 1.1};
    Range c{7.0, 9.0};
    Range cbar1{8.0, 10.0};
    Range cbar2{12.0, 14.0};

    std::uint64_t parameter_seed = 1;
    ArmaSpec arma = reference_arma_spec();
    /// Mean demand per period. Empty means trend_scale * (3 + sin(2 pi t / T)).
    std::vector<double> trend;
    double trend_scale = 0.5;

    [[nodiscard]] std::size_t providers() const noexcept { return providers1 + providers2; }

    void validate() const {
        if (horizon < 2) throw InvalidArgument("ProductionModelSpec: horizon must be at least 2");
        if (units == 0 || providers2 == 0)
            throw InvalidArgument("ProductionModelSpec: need at least one unit and one unbounded provider");
        for (const Range* r : {&a, &b, &delta, &w, &z, &rho, &c, &cbar1, &cbar2})
            if (!(r->lo <= r->hi)) throw InvalidArgument("ProductionModelSpec: empty parameter range");
        if (!(a.hi <= b.lo)) throw InvalidArgument("ProductionModelSpec: unit lower bounds must lie below upper bounds");
        if (!(w.hi <= z.lo)) throw InvalidArgument("ProductionModelSpec: provider lower bounds must lie below capacities");
        if (!(c.lo > 0.0 && cbar1.lo > 0.0 && cbar2.lo > 0.0 && rho.lo > 0.0 && delta.lo >= 0.0))
            throw InvalidArgument("ProductionModelSpec: prices and ramp limits must be positive");
        if (!(cbar2.lo > cbar1.hi))
            throw InvalidArgument("ProductionModelSpec: unbounded providers must be strictly more expensive");
        if (!trend.empty() && trend.size() != horizon)
            throw InvalidArgument("ProductionModelSpec: trend must have one entry per period");
    }
};

inline std::vector<double> default_trend(std::size_t horizon, double scale) {
    std::vector<double> m(horizon);
    for (std::size_t t = 0; t < horizon; ++t)
        m[t] = scale * (3.0 + std::sin(2.0 * std::numbers::pi * static_cast<double>(t + 1) / static_cast<double>(horizon)));
    return m;
}

/// Index helpers for the variable layout above.
struct ProductionLayout {
    std::size_t horizon, units, providers;

    [[nodiscard]] std::size_t x(std::size_t i, std::size_t t) const { return i * horizon + t; }
    [[nodiscard]] std::size_t y(std::size_t j, std::size_t t) const { return j * horizon + t; }
    [[nodiscard]] std::size_t surplus(std::size_t t) const { return providers * horizon + t; }
    [[nodiscard]] std::size_t slack(std::size_t j, std::size_t t) const {
        return providers * horizon + horizon + j * (horizon - 1) + t;
    }
    [[nodiscard]] std::size_t recourse_cols() const { return providers * horizon + horizon + providers * (horizon - 1); }
    [[nodiscard]] std::size_t recourse_rows() const { return horizon + providers * (horizon - 1); }
    [[nodiscard]] std::size_t ramp_row(std::size_t j, std::size_t t) const { return horizon + j * (horizon - 1) + t; }
};

/// Draws every parameter uniformly from its range (one mt19937_64 stream
/// seeded from parameter_seed) and builds the two-stage problem with the
/// ARMA covariance factored as requested.
inline TwoStageProblem generate_model(const ProductionModelSpec& spec, FactorKind factor = FactorKind::pca) {
    spec.validate();
    const std::size_t nt = spec.horizon, ni = spec.units, m1 = spec.providers1, m = spec.providers();
    const ProductionLayout lay{nt, ni, m};
    std::mt19937_64 gen(derive_seed(spec.parameter_seed, Stream::parameters));
    auto draw = [&](const Range& r) { return std::uniform_real_distribution<double>(r.lo, r.hi)(gen); };

    TwoStageProblem p;
    p.name = "production_T" + std::to_string(nt) + "_I" + std::to_string(ni) + "_m" + std::to_string(m1) + "+" +
             std::to_string(spec.providers2);

    // first stage
    const std::size_t nx = ni * nt;
    p.c.resize(nx);
    std::vector<double> lo(nx), hi(nx);
    for (std::size_t i = 0; i < ni; ++i)
        for (std::size_t t = 0; t < nt; ++t) {
            lo[lay.x(i, t)] = draw(spec.a);
            hi[lay.x(i, t)] = draw(spec.b);
            p.c[lay.x(i, t)] = draw(spec.c);
        }
    p.x_set = FirstStageSet::box(lo, hi);
    p.x_set.g = Matrix(ni * (nt - 1), nx);
    for (std::size_t i = 0; i < ni; ++i)
        for (std::size_t t = 0; t + 1 < nt; ++t) {
            const std::size_t row = i * (nt - 1) + t;
            const double dl = draw(spec.delta);
            p.x_set.g(row, lay.x(i, t)) = 1.0;
            p.x_set.g(row, lay.x(i, t + 1)) = -1.0;
            p.x_set.row_lower.push_back(-dl);
            p.x_set.row_upper.push_back(dl);
        }

    // second stage
    const std::size_t ny = lay.recourse_cols(), nr = lay.recourse_rows();
    p.q.assign(ny, 0.0);
    p.y_lower.assign(ny, 0.0);
    p.y_upper.assign(ny, kInf);
    p.w = Matrix(nr, ny);
    p.t = Matrix(nr, nx);
    p.hbar.assign(nr - nt, 0.0);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t t = 0; t < nt; ++t) {
            const std::size_t k = lay.y(j, t);
            p.y_lower[k] = draw(spec.w);
            p.y_upper[k] = j < m1 ? draw(spec.z) : kInf;
            p.q[k] = draw(j < m1 ? spec.cbar1 : spec.cbar2);
            p.w(t, k) = 1.0;
        }
    for (std::size_t t = 0; t < nt; ++t) {
        p.w(t, lay.surplus(t)) = -1.0;
        for (std::size_t i = 0; i < ni; ++i) p.t(t, lay.x(i, t)) = 1.0;
    }
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t t = 0; t + 1 < nt; ++t) {
            const std::size_t row = lay.ramp_row(j, t);
            const double r = draw(spec.rho);
            p.w(row, lay.y(j, t)) = 1.0;
            p.w(row, lay.y(j, t + 1)) = -1.0;
            p.w(row, lay.slack(j, t)) = 1.0;
            p.y_upper[lay.slack(j, t)] = 2.0 * r;
            p.hbar[row - nt] = r;
        }

    p.mean = spec.trend.empty() ? default_trend(nt, spec.trend_scale) : spec.trend;
    const auto lambda = arma_autocovariance(spec.arma, nt);
    p.factor = factorize(toeplitz_cov(lambda), factor).a;
    p.validate();
    return p;
}

/// Same problem with the covariance factor replaced.
inline TwoStageProblem with_factor(TwoStageProblem p, const ProductionModelSpec& spec, FactorKind factor) {
    p.factor = factorize(toeplitz_cov(arma_autocovariance(spec.arma, spec.horizon)), factor).a;
    return p;
}

}  // namespace tsqmc
