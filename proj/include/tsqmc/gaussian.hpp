#pragma once

// Standard normal quantile (Moro), CDF, density and partial moments, plus the
// map from uniform points to correlated Gaussian samples.

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <utility>

#include "tsqmc/errors.hpp"
#include "tsqmc/linalg.hpp"
#include "tsqmc/points.hpp"

namespace tsqmc {

/// Moro's approximation to the standard normal quantile: a Beasley-Springer
/// rational function near the centre and a Chebyshev series in
/// log(-log(min(u, 1-u))) in the tails. The switch sits at |u - 0.5| = 0.41
/// rather than Moro's 0.42; the rational part peaks at 3.008e-9 error right
/// at 0.42, while the tail series is good to 1e-10 over [0.41, 0.42].
inline double inv_norm_cdf(double u) {
    if (!(u > 0.0 && u < 1.0)) throw InvalidArgument("inv_norm_cdf: argument must lie in (0,1)");
    static constexpr double a[4] = {2.50662823884, -18.61500062529, 41.39119773534, -25.44106049637};
    static constexpr double b[4] = {-8.47351093090, 23.08336743743, -21.06224101826, 3.13082909833};
    static constexpr double c[9] = {0.3374754822726147, 0.9761690190917186, 0.1607979714918209,
                                    0.0276438810333863, 0.0038405729373609, 0.0003951896511919,
                                    0.0000321767881768, 0.0000002888167364, 0.0000003960315187};
    const double y = u - 0.5;
    if (std::abs(y) < 0.41) {
        const double r = y * y;
        return y * (((a[3] * r + a[2]) * r + a[1]) * r + a[0]) /
               ((((b[3] * r + b[2]) * r + b[1]) * r + b[0]) * r + 1.0);
    }
    double r = y > 0.0 ? 1.0 - u : u;
    r = std::log(-std::log(r));
    double x = c[8];
    for (int i = 7; i >= 0; --i) x = x * r + c[i];
    return y < 0.0 ? -x : x;
}

inline double norm_pdf(double t) {
    return std::exp(-0.5 * t * t) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

/// Phi(t) through the complementary error function, which keeps full relative
/// accuracy in the lower tail.
inline double norm_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

/// Upper tail 1 - Phi(t).
inline double norm_sf(double t) { return 0.5 * std::erfc(t / std::numbers::sqrt2); }

/// N(mean, sigma^2) marginal.
struct GaussianMarginal {
    double mean = 0.0;
    double sigma = 1.0;

    GaussianMarginal() = default;
    GaussianMarginal(double m, double s) : mean(m), sigma(s) {
        if (!(s > 0.0)) throw InvalidArgument("GaussianMarginal: sigma must be positive");
    }
    [[nodiscard]] double pdf(double x) const { return norm_pdf((x - mean) / sigma) / sigma; }
    [[nodiscard]] double cdf(double x) const { return norm_cdf((x - mean) / sigma); }
};

struct PartialMoment {
    double mass = 0.0;          // P(a <= X <= b)
    double first_moment = 0.0;  // E[X; a <= X <= b]
};

/// Mass and first moment of the standard normal over [a, b]; either end may
/// be infinite.
inline PartialMoment partial_moment(double a, double b) {
    if (std::isnan(a) || std::isnan(b)) throw InvalidArgument("partial_moment: NaN bound");
    if (a > b) throw InvalidArgument("partial_moment: lower bound exceeds upper bound");
    // Differences of upper tails lose less precision when both ends are positive.
    const double mass = a > 0.0 ? norm_sf(a) - norm_sf(b) : norm_cdf(b) - norm_cdf(a);
    const double ra = std::isinf(a) ? 0.0 : norm_pdf(a);
    const double rb = std::isinf(b) ? 0.0 : norm_pdf(b);
    return {mass, ra - rb};
}

/// Smallest and largest uniforms fed to the quantile function.
inline constexpr double kUniformFloor = 0x1p-53;
inline constexpr double kUniformCeil = 1.0 - 0x1p-53;

/// Rows xi^j = A * (Phi^{-1}(x^j_1), ..., Phi^{-1}(x^j_d)) + mean. Coordinates
/// equal to 0 (always present in unshifted nets and lattices) or too close to
/// 1 are clamped to [2^-53, 1 - 2^-53].
inline Matrix to_gaussian(const PointSet& points, const Matrix& a, std::span<const double> mean) {
    const std::size_t d = points.dim();
    if (a.rows() != d || a.cols() != d)
        throw InvalidArgument("to_gaussian: factor is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                              ", points have dimension " + std::to_string(d));
    if (mean.size() != d) throw InvalidArgument("to_gaussian: mean has wrong dimension");
    Matrix out(points.size(), d);
    std::vector<double> eta(d);
    for (std::size_t j = 0; j < points.size(); ++j) {
        const auto x = points.point(j);
        for (std::size_t i = 0; i < d; ++i) eta[i] = inv_norm_cdf(std::clamp(x[i], kUniformFloor, kUniformCeil));
        auto row = out.row(j);
        for (std::size_t r = 0; r < d; ++r) {
            const auto ar = a.row(r);
            double s = mean[r];
            for (std::size_t i = 0; i < d; ++i) s += ar[i] * eta[i];
            row[r] = s;
        }
    }
    return out;
}

}  // namespace tsqmc
